#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <random>
#include <sstream>

#include "pctk/mtx_io.hpp"
#include "pctk/problems.hpp"
#include "support/oracles.hpp"

using namespace pctk;

TEST_CASE("csr construction enforces canonical form") {
  CHECK_THROWS_AS(CsrMatrix(2, 2, {0, 1}, {0}, {1.0}), Error);          // offsets length
  CHECK_THROWS_AS(CsrMatrix(1, 2, {0, 2}, {1, 0}, {1.0, 2.0}), Error);  // unsorted row
  CHECK_THROWS_AS(CsrMatrix(1, 2, {0, 2}, {0, 0}, {1.0, 2.0}), Error);  // duplicate col
  CHECK_THROWS_AS(CsrMatrix(1, 2, {0, 1}, {2}, {1.0}), Error);          // col out of range
}

TEST_CASE("from_triplets canonicalizes and sums duplicates") {
  const CsrMatrix A = CsrMatrix::from_triplets(
      2, 2, {{1, 1, 2.0}, {0, 1, 1.0}, {1, 1, 3.0}, {0, 0, 4.0}});
  CHECK(A.nnz() == 3);
  CHECK(A.at(0, 0) == 4.0);
  CHECK(A.at(0, 1) == 1.0);
  CHECK(A.at(1, 1) == 5.0);
  CHECK(A.at(1, 0) == 0.0);
}

TEST_CASE("spmv basic cases") {
  const CsrMatrix I3 = CsrMatrix::identity(3);
  CHECK(spmv(I3, {1.0, 2.0, 3.0}) == DenseVector{1.0, 2.0, 3.0});

  const CsrMatrix Z = CsrMatrix::zero(2, 2);
  CHECK(spmv(Z, {5.0, 7.0}) == DenseVector{0.0, 0.0});

  // A=[[1,2],[0,3]] * (1,1) = (3,3)
  const CsrMatrix A =
      CsrMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, 2.0}, {1, 1, 3.0}});
  CHECK(spmv(A, {1.0, 1.0}) == DenseVector{3.0, 3.0});

  CHECK_THROWS_AS(spmv(A, {1.0, 2.0, 3.0}), Error);
}

TEST_CASE("spmv_transpose basic cases") {
  const CsrMatrix I3 = CsrMatrix::identity(3);
  CHECK(spmv_transpose(I3, {4.0, 5.0, 6.0}) == DenseVector{4.0, 5.0, 6.0});

  const CsrMatrix A =
      CsrMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, 2.0}, {1, 1, 3.0}});
  CHECK(spmv_transpose(A, {1.0, 1.0}) == DenseVector{1.0, 5.0});

  CHECK_THROWS_AS(spmv_transpose(A, {1.0, 2.0, 3.0}), Error);
}

TEST_CASE("spmv_transpose of mixed-Poisson B matches explicit transpose") {
  const auto sys = gen_mixed_poisson(2, 7);
  const CsrMatrix B = extract_block(sys.K, {"p"}, {"q"}).matrix;
  const DenseVector ones(static_cast<std::size_t>(B.nrows()), 1.0);
  const DenseVector via_transpose = spmv(transpose(B), ones);
  const DenseVector direct = spmv_transpose(B, ones);
  REQUIRE(via_transpose.size() == direct.size());
  for (std::size_t i = 0; i < direct.size(); ++i)
    CHECK(direct[i] == Catch::Approx(via_transpose[i]).margin(1e-15));
}

TEST_CASE("transpose shapes and exactness") {
  const CsrMatrix I4 = CsrMatrix::identity(4);
  const CsrMatrix I4t = transpose(I4);
  CHECK(oracle::max_abs_diff(oracle::to_eigen(I4t), oracle::to_eigen(I4)) == 0.0);

  const CsrMatrix row = CsrMatrix::from_triplets(1, 3, {{0, 0, 1.0}, {0, 2, 2.0}});
  const CsrMatrix col = transpose(row);
  CHECK(col.nrows() == 3);
  CHECK(col.ncols() == 1);
  CHECK(col.at(0, 0) == 1.0);
  CHECK(col.at(2, 0) == 2.0);

  std::mt19937 gen(11);
  const CsrMatrix A = oracle::random_csr(gen, 5, 7, 0.2);
  CHECK(oracle::max_abs_diff(oracle::to_eigen(transpose(A)),
                             oracle::to_eigen(A).transpose()) == 0.0);
  // bitwise round trip
  const CsrMatrix Att = transpose(transpose(A));
  CHECK(Att.row_offsets() == A.row_offsets());
  CHECK(Att.col_indices() == A.col_indices());
  CHECK(Att.values() == A.values());
}

TEST_CASE("matmat against dense oracle") {
  std::mt19937 gen(22);
  const CsrMatrix A = oracle::random_csr(gen, 3, 3, 0.8);
  const CsrMatrix AI = matmat(A, CsrMatrix::identity(3));
  CHECK(oracle::max_abs_diff(oracle::to_eigen(AI), oracle::to_eigen(A)) == 0.0);

  const CsrMatrix L =
      CsrMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 1, 1.0}});
  const CsrMatrix R =
      CsrMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {1, 0, 1.0}, {1, 1, 1.0}});
  const CsrMatrix P = matmat(L, R);
  CHECK(P.at(0, 0) == 2.0);
  CHECK(P.at(0, 1) == 1.0);
  CHECK(P.at(1, 0) == 1.0);
  CHECK(P.at(1, 1) == 1.0);

  const CsrMatrix X = oracle::random_csr(gen, 6, 4, 0.5);
  const CsrMatrix Y = oracle::random_csr(gen, 4, 5, 0.5);
  CHECK(oracle::rel_diff(oracle::to_eigen(matmat(X, Y)),
                         oracle::to_eigen(X) * oracle::to_eigen(Y)) < 1e-13);

  CHECK_THROWS_AS(matmat(X, X), Error);
}

TEST_CASE("matmat associativity on random triples") {
  std::mt19937 gen(33);
  for (int rep = 0; rep < 5; ++rep) {
    const CsrMatrix A = oracle::random_csr(gen, 5, 4, 0.5);
    const CsrMatrix B = oracle::random_csr(gen, 4, 6, 0.5);
    const CsrMatrix C = oracle::random_csr(gen, 6, 3, 0.5);
    const auto left = oracle::to_eigen(matmat(matmat(A, B), C));
    const auto right = oracle::to_eigen(matmat(A, matmat(B, C)));
    CHECK(oracle::rel_diff(left, right) < 1e-12);
  }
}

TEST_CASE("extract_submatrix slices in index order") {
  std::mt19937 gen(44);
  const CsrMatrix A = oracle::random_csr(gen, 4, 4, 0.9);
  std::vector<index_t> all = {0, 1, 2, 3};
  const CsrMatrix full = extract_submatrix(A, all, all);
  CHECK(oracle::max_abs_diff(oracle::to_eigen(full), oracle::to_eigen(A)) == 0.0);

  const CsrMatrix M = CsrMatrix::from_triplets(
      2, 2, {{0, 0, 1.0}, {0, 1, 2.0}, {1, 0, 3.0}, {1, 1, 4.0}});
  const CsrMatrix S = extract_submatrix(M, {1}, {0});
  CHECK(S.nrows() == 1);
  CHECK(S.ncols() == 1);
  CHECK(S.at(0, 0) == 3.0);

  // order is semantic: reversed columns
  const CsrMatrix R = extract_submatrix(M, {0, 1}, {1, 0});
  CHECK(R.at(0, 0) == 2.0);
  CHECK(R.at(0, 1) == 1.0);

  CHECK_THROWS_AS(extract_submatrix(M, {2}, {0}), Error);
  CHECK_THROWS_AS(extract_submatrix(M, {0}, {-1}), Error);
}

TEST_CASE("extraction composes") {
  std::mt19937 gen(55);
  const CsrMatrix A = oracle::random_csr(gen, 8, 8, 0.4);
  const std::vector<index_t> r1 = {6, 2, 4, 0, 7};
  const std::vector<index_t> c1 = {1, 3, 5, 2};
  const CsrMatrix first = extract_submatrix(A, r1, c1);
  const std::vector<index_t> r2 = {3, 1};
  const std::vector<index_t> c2 = {2, 0};
  const CsrMatrix twice = extract_submatrix(first, r2, c2);
  std::vector<index_t> rc, cc;
  for (index_t i : r2) rc.push_back(r1[i]);
  for (index_t j : c2) cc.push_back(c1[j]);
  const CsrMatrix once = extract_submatrix(A, rc, cc);
  CHECK(oracle::max_abs_diff(oracle::to_eigen(twice), oracle::to_eigen(once)) == 0.0);
}

TEST_CASE("diagonal") {
  CHECK(diagonal(CsrMatrix::identity(3)) == DenseVector{1.0, 1.0, 1.0});

  // structurally absent diagonal reads as zero
  const CsrMatrix A =
      CsrMatrix::from_triplets(2, 2, {{0, 0, 2.0}, {0, 1, 1.0}, {1, 0, 1.0}});
  CHECK(diagonal(A) == DenseVector{2.0, 0.0});

  const auto sys = gen_mixed_poisson(2, 3);
  const CsrMatrix Ablk = extract_block(sys.K, {"q"}, {"q"}).matrix;
  const auto dense = oracle::to_eigen(Ablk);
  const DenseVector d = diagonal(Ablk);
  for (index_t i = 0; i < Ablk.nrows(); ++i) CHECK(d[i] == dense(i, i));

  CHECK_THROWS_AS(diagonal(CsrMatrix::zero(2, 3)), Error);
}

TEST_CASE("spmv_transpose equals spmv of transpose on random matrices") {
  std::mt19937 gen(66);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    const CsrMatrix A = oracle::random_csr(gen, 9, 6, 0.3);
    DenseVector x(9);
    for (auto& v : x) v = val(gen);
    const DenseVector a = spmv_transpose(A, x);
    const DenseVector b = spmv(transpose(A), x);
    double scale = 1e-300;
    for (double v : b) scale = std::max(scale, std::fabs(v));
    for (std::size_t i = 0; i < a.size(); ++i)
      CHECK(std::fabs(a[i] - b[i]) <= 1e-14 * std::max(1.0, scale));
  }
}

TEST_CASE("matrix market round trip") {
  std::mt19937 gen(77);
  const CsrMatrix A = oracle::random_csr(gen, 7, 5, 0.3);
  std::ostringstream out;
  write_matrix_market(out, A);
  std::istringstream in(out.str());
  const CsrMatrix B = read_matrix_market(in);
  CHECK(B.nrows() == A.nrows());
  CHECK(B.ncols() == A.ncols());
  CHECK(B.row_offsets() == A.row_offsets());
  CHECK(B.col_indices() == A.col_indices());
  CHECK(B.values() == A.values());  // 17 significant digits round-trip exactly

  // re-writing the parsed matrix is byte-identical
  std::ostringstream again;
  write_matrix_market(again, B);
  CHECK(again.str() == out.str());
}

TEST_CASE("matrix market rejects other formats") {
  std::istringstream bad("%%MatrixMarket matrix coordinate complex general\n1 1 0\n");
  CHECK_THROWS_AS(read_matrix_market(bad), Error);
  std::istringstream sym("%%MatrixMarket matrix coordinate real symmetric\n1 1 0\n");
  CHECK_THROWS_AS(read_matrix_market(sym), Error);
}

TEST_CASE("vector io: array format and plain text") {
  const DenseVector v = {1.5, -2.25, 3.0e-17, 4.0};
  const auto dir = std::filesystem::temp_directory_path() / "pctk_vec_io";
  std::filesystem::create_directories(dir);
  const std::string mtx = (dir / "v.mtx").string();
  const std::string txt = (dir / "v.txt").string();
  write_vector_mtx(mtx, v);
  write_vector_txt(txt, v);
  CHECK(read_vector(mtx) == v);
  CHECK(read_vector(txt) == v);
}
