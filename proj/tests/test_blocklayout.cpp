#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "pctk/layout.hpp"
#include "support/oracles.hpp"

using namespace pctk;

TEST_CASE("contiguous layout") {
  const BlockLayout l = make_contiguous_layout({{"q", 3}, {"p", 2}});
  CHECK(l.global_size() == 5);
  CHECK(l.field("q").indices.indices == std::vector<index_t>{0, 1, 2});
  CHECK(l.field("p").indices.indices == std::vector<index_t>{3, 4});

  const BlockLayout single = make_contiguous_layout({{"u", 1}});
  CHECK(single.global_size() == 1);
  CHECK(single.field("u").indices.indices == std::vector<index_t>{0});

  const BlockLayout three = make_contiguous_layout({{"a", 2}, {"b", 2}, {"c", 2}});
  CHECK(three.global_size() == 6);
  CHECK(three.field("c").indices.indices == std::vector<index_t>{4, 5});

  CHECK_THROWS_AS(make_contiguous_layout({{"a", 2}, {"a", 1}}), Error);
  CHECK_THROWS_AS(make_contiguous_layout({{"a", 0}}), Error);
}

TEST_CASE("interleaved layout") {
  const BlockLayout l = make_interleaved_layout({{"u", 3}, {"v", 3}}, {1, 1});
  CHECK(l.field("u").indices.indices == std::vector<index_t>{0, 2, 4});
  CHECK(l.field("v").indices.indices == std::vector<index_t>{1, 3, 5});

  const BlockLayout one = make_interleaved_layout({{"u", 4}}, {1});
  CHECK(one.field("u").indices.indices == std::vector<index_t>{0, 1, 2, 3});

  const BlockLayout two = make_interleaved_layout({{"a", 4}, {"b", 2}}, {2, 1});
  CHECK(two.field("a").indices.indices == std::vector<index_t>{0, 1, 3, 4});
  CHECK(two.field("b").indices.indices == std::vector<index_t>{2, 5});

  CHECK_THROWS_AS(make_interleaved_layout({{"a", 3}, {"b", 2}}, {2, 1}), Error);
}

TEST_CASE("layout invariants enforced") {
  // not covering
  CHECK_THROWS_AS(BlockLayout({{"a", IndexSet({0, 1})}}, 3), Error);
  // overlap
  CHECK_THROWS_AS(BlockLayout({{"a", IndexSet({0, 1})}, {"b", IndexSet({1, 2})}}, 3),
                  Error);
  // out of range
  CHECK_THROWS_AS(BlockLayout({{"a", IndexSet({0, 5})}}, 2), Error);
  // duplicate index inside a set
  CHECK_THROWS_AS(IndexSet({0, 0}), Error);
}

TEST_CASE("group_fields") {
  const BlockLayout l = make_contiguous_layout({{"v", 3}, {"p", 2}});
  const BlockLayout all = group_fields(l, {{"all", {"v", "p"}}});
  CHECK(all.num_fields() == 1);
  CHECK(all.field("all").indices.indices == std::vector<index_t>{0, 1, 2, 3, 4});

  // non-adjacent grouping with layout order T, v, p
  const BlockLayout tvp = make_contiguous_layout({{"T", 2}, {"v", 3}, {"p", 2}});
  const BlockLayout grouped = group_fields(tvp, {{"ns", {"v", "p"}}, {"temp", {"T"}}});
  CHECK(grouped.field("ns").indices.indices == std::vector<index_t>{2, 3, 4, 5, 6});
  CHECK(grouped.field("temp").indices.indices == std::vector<index_t>{0, 1});

  CHECK_THROWS_AS(group_fields(l, {{"g", {"v", "x"}}}), Error);       // unknown
  CHECK_THROWS_AS(group_fields(l, {{"g", {"v", "v", "p"}}}), Error);  // twice
  CHECK_THROWS_AS(group_fields(l, {{"g", {"v"}}}), Error);            // uncovered
}

TEST_CASE("grouping then extracting equals dense permutation") {
  std::mt19937 gen(3);
  const CsrMatrix A = oracle::random_csr(gen, 7, 7, 0.5);
  const BlockLayout l = make_contiguous_layout({{"a", 2}, {"b", 3}, {"c", 2}});
  const SplittableMatrix M(A, l);
  const SplittableMatrix sub = extract_block(M, {"c", "a"}, {"c", "a"});
  // concatenated index order: c = {5,6}, a = {0,1}
  const std::vector<index_t> perm = {5, 6, 0, 1};
  const auto dense = oracle::to_eigen(A);
  const auto got = oracle::to_eigen(sub.matrix);
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = 0; j < perm.size(); ++j)
      CHECK(got(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) ==
            dense(perm[i], perm[j]));
  // derived layout renumbers locally, preserving group order
  CHECK(sub.row_layout.field("c").indices.indices == std::vector<index_t>{0, 1});
  CHECK(sub.row_layout.field("a").indices.indices == std::vector<index_t>{2, 3});
}

TEST_CASE("extract_block full and named-block cases") {
  std::mt19937 gen(5);
  const CsrMatrix A = oracle::random_csr(gen, 6, 6, 0.6);
  const BlockLayout l = make_contiguous_layout({{"a", 2}, {"b", 2}, {"c", 2}});
  const SplittableMatrix M(A, l);

  const SplittableMatrix full = extract_block(M, {"a", "b", "c"}, {"a", "b", "c"});
  CHECK(oracle::max_abs_diff(oracle::to_eigen(full.matrix), oracle::to_eigen(A)) == 0.0);

  const SplittableMatrix ac = extract_block(M, {"a", "c"}, {"a", "c"});
  const std::vector<index_t> sel = {0, 1, 4, 5};
  const auto dense = oracle::to_eigen(A);
  const auto got = oracle::to_eigen(ac.matrix);
  for (std::size_t i = 0; i < sel.size(); ++i)
    for (std::size_t j = 0; j < sel.size(); ++j)
      CHECK(got(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) ==
            dense(sel[i], sel[j]));

  CHECK_THROWS_AS(extract_block(M, {"nope"}, {"a"}), Error);
}

TEST_CASE("rectangular extraction carries independent layouts") {
  std::mt19937 gen(6);
  const CsrMatrix A = oracle::random_csr(gen, 5, 7, 0.6);
  const SplittableMatrix M(A, make_contiguous_layout({{"r0", 2}, {"r1", 3}}),
                           make_contiguous_layout({{"c0", 4}, {"c1", 3}}));
  const SplittableMatrix blk = extract_block(M, {"r1"}, {"c0"});
  CHECK(blk.matrix.nrows() == 3);
  CHECK(blk.matrix.ncols() == 4);
  const auto dense = oracle::to_eigen(A);
  const auto got = oracle::to_eigen(blk.matrix);
  for (index_t i = 0; i < 3; ++i)
    for (index_t j = 0; j < 4; ++j) CHECK(got(i, j) == dense(2 + i, j));
}

TEST_CASE("restrict and prolong vectors") {
  const BlockLayout l = make_contiguous_layout({{"q", 3}, {"p", 2}});
  const DenseVector x = {9.0, 8.0, 7.0, 6.0, 5.0};
  CHECK(restrict_vector(l, x, {"p"}) == DenseVector{6.0, 5.0});
  CHECK(restrict_vector(l, x, {"p", "q"}) == DenseVector{6.0, 5.0, 9.0, 8.0, 7.0});

  DenseVector y(5, 0.0);
  prolong_vector(l, {"p", "q"}, {6.0, 5.0, 9.0, 8.0, 7.0}, y);
  CHECK(y == x);

  DenseVector z = x;
  prolong_vector(l, {"p"}, {1.0, 1.0}, z, ScatterMode::add);
  CHECK(z == DenseVector{9.0, 8.0, 7.0, 7.0, 6.0});

  CHECK_THROWS_AS(restrict_vector(l, {1.0, 2.0}, {"p"}), Error);
}

TEST_CASE("interleaved and contiguous layouts agree up to permutation") {
  // one logical problem, two orderings; extraction yields the same blocks
  std::mt19937 gen(8);
  const index_t nodes = 4;
  const BlockLayout inter = make_interleaved_layout({{"u", nodes}, {"v", nodes}}, {1, 1});
  const BlockLayout cont = make_contiguous_layout({{"u", nodes}, {"v", nodes}});
  // build the interleaved matrix, then permute densely into contiguous order
  const CsrMatrix Ai = oracle::random_csr(gen, 2 * nodes, 2 * nodes, 0.6);
  const auto dense_i = oracle::to_eigen(Ai);
  std::vector<index_t> perm;  // contiguous position -> interleaved index
  for (index_t k = 0; k < nodes; ++k) perm.push_back(2 * k);
  for (index_t k = 0; k < nodes; ++k) perm.push_back(2 * k + 1);
  Eigen::MatrixXd dense_c(2 * nodes, 2 * nodes);
  for (index_t i = 0; i < 2 * nodes; ++i)
    for (index_t j = 0; j < 2 * nodes; ++j) dense_c(i, j) = dense_i(perm[i], perm[j]);
  const SplittableMatrix Mi(Ai, inter);
  const SplittableMatrix Mc(oracle::csr_from_eigen(dense_c), cont);
  for (const char* f : {"u", "v"}) {
    const auto bi = oracle::to_eigen(extract_block(Mi, {f}, {f}).matrix);
    const auto bc = oracle::to_eigen(extract_block(Mc, {f}, {f}).matrix);
    CHECK(oracle::max_abs_diff(bi, bc) == 0.0);
  }
}

TEST_CASE("layout sidecar json round trip") {
  const BlockLayout l = make_contiguous_layout({{"q", 24}, {"p", 16}});
  const auto j = layout_to_json(l);
  CHECK(j["fields"][0].contains("range"));  // contiguous ranges are compressed
  const BlockLayout back = layout_from_json(j);
  CHECK(back.global_size() == l.global_size());
  CHECK(back.field("q").indices.indices == l.field("q").indices.indices);

  // scattered sets serialize as explicit indices
  const BlockLayout scattered({{"a", IndexSet({0, 2})}, {"b", IndexSet({1, 3})}}, 4);
  const auto js = layout_to_json(scattered);
  CHECK(js["fields"][0].contains("indices"));
  const BlockLayout back2 = layout_from_json(js);
  CHECK(back2.field("a").indices.indices == std::vector<index_t>{0, 2});
}
