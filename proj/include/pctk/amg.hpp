/// \file amg.hpp
/// \brief Plain (unsmoothed) aggregation algebraic multigrid.
///
/// Strength of connection: |a_ij| > theta * sqrt(|a_ii a_jj|). Greedy
/// aggregation, piecewise-constant prolongation, Galerkin coarse operators
/// P^T A P, weighted-Jacobi smoothing (one pre- and one post-sweep), dense LU
/// on the coarsest level. Intended for symmetric-dominant operators; quality
/// on strongly nonsymmetric systems is not a goal.

#pragma once

#include <cstdio>

#include "pctk/pc.hpp"

namespace pctk {

struct AmgParams {
  double theta = 0.08;       ///< strength threshold
  index_t coarse_size = 64;  ///< dense solve at or below this many rows
  index_t max_levels = 25;
  double omega = 2.0 / 3.0;  ///< Jacobi smoothing weight
  index_t cycle = 2;         ///< recursive coarse visits: 1 = V-cycle, 2 = W-cycle
  index_t sweeps = 1;        ///< Jacobi sweeps per pre/post smoothing pass
  double over_correction = 1.0;  ///< scaling of the piecewise-constant correction
  std::string aggregation = "pairwise2";  ///< "pairwise2" (matching applied twice)
                                          ///< or "greedy" (root plus neighborhood)
};

namespace detail {

/// Greedy strength-based pairwise matching: each node pairs with its most
/// strongly connected unmatched neighbor. Returns aggregate ids (pairs and
/// singletons).
inline index_t pairwise_match(const CsrMatrix& A, double theta,
                              std::vector<index_t>& agg) {
  const index_t n = A.nrows();
  const DenseVector diag = diagonal(A);
  const auto& off = A.row_offsets();
  const auto& col = A.col_indices();
  const auto& val = A.values();
  agg.assign(static_cast<std::size_t>(n), -1);
  index_t n_agg = 0;
  for (index_t i = 0; i < n; ++i) {
    if (agg[i] >= 0) continue;
    index_t mate = -1;
    double best = 0.0;
    for (index_t k = off[i]; k < off[i + 1]; ++k) {
      const index_t j = col[k];
      if (j == i || agg[j] >= 0) continue;
      const double w = std::fabs(val[k]);
      if (w > theta * std::sqrt(std::fabs(diag[i] * diag[j])) && w > best) {
        best = w;
        mate = j;
      }
    }
    agg[i] = n_agg;
    if (mate >= 0) agg[mate] = n_agg;
    ++n_agg;
  }
  return n_agg;
}

/// Greedy strength-based aggregation. Returns the aggregate id per row and
/// the number of aggregates.
inline index_t aggregate(const CsrMatrix& A, double theta, std::vector<index_t>& agg) {
  const index_t n = A.nrows();
  const DenseVector diag = diagonal(A);
  const auto& off = A.row_offsets();
  const auto& col = A.col_indices();
  const auto& val = A.values();
  auto strong = [&](index_t i, index_t k) {
    const index_t j = col[k];
    if (j == i) return false;
    return std::fabs(val[k]) > theta * std::sqrt(std::fabs(diag[i] * diag[j]));
  };
  agg.assign(static_cast<std::size_t>(n), -1);
  index_t n_agg = 0;
  // pass 1: roots whose strong neighborhood is entirely free
  for (index_t i = 0; i < n; ++i) {
    if (agg[i] >= 0) continue;
    bool free_nbhd = true;
    for (index_t k = off[i]; k < off[i + 1] && free_nbhd; ++k)
      if (strong(i, k) && agg[col[k]] >= 0) free_nbhd = false;
    if (!free_nbhd) continue;
    agg[i] = n_agg;
    for (index_t k = off[i]; k < off[i + 1]; ++k)
      if (strong(i, k)) agg[col[k]] = n_agg;
    ++n_agg;
  }
  // pass 2: join the most strongly connected neighboring aggregate
  for (index_t i = 0; i < n; ++i) {
    if (agg[i] >= 0) continue;
    index_t best = -1;
    double best_w = 0.0;
    for (index_t k = off[i]; k < off[i + 1]; ++k) {
      if (!strong(i, k) || agg[col[k]] < 0) continue;
      const double w = std::fabs(val[k]);
      if (w > best_w) {
        best_w = w;
        best = agg[col[k]];
      }
    }
    if (best >= 0) agg[i] = best;
  }
  // pass 3: leftovers become singletons
  for (index_t i = 0; i < n; ++i)
    if (agg[i] < 0) agg[i] = n_agg++;
  return n_agg;
}

inline CsrMatrix piecewise_constant_prolongation(const std::vector<index_t>& agg,
                                                 index_t n_agg) {
  const index_t n = static_cast<index_t>(agg.size());
  std::vector<index_t> offsets(static_cast<std::size_t>(n) + 1);
  for (index_t i = 0; i <= n; ++i) offsets[i] = i;
  std::vector<index_t> cols(agg.begin(), agg.end());
  return CsrMatrix(n, n_agg, std::move(offsets), std::move(cols),
                   std::vector<double>(static_cast<std::size_t>(n), 1.0));
}

}  // namespace detail

class AmgPc final : public Preconditioner {
public:
  explicit AmgPc(const CsrMatrix& A, AmgParams params = {}) : params_(params) {
    require(A.nrows() == A.ncols(), "amg: matrix must be square");
    require(params_.aggregation == "greedy" || params_.aggregation == "pairwise2",
            "amg: aggregation must be greedy|pairwise2");
    CsrMatrix current = A;
    while (current.nrows() > params_.coarse_size &&
           static_cast<index_t>(levels_.size()) + 1 < params_.max_levels) {
      std::vector<index_t> agg;
      index_t n_agg = 0;
      if (params_.aggregation == "pairwise2") {
        std::vector<index_t> a1, a2;
        const index_t m1 = detail::pairwise_match(current, params_.theta, a1);
        const CsrMatrix P1 = detail::piecewise_constant_prolongation(a1, m1);
        const CsrMatrix A1 = matmat(transpose(P1), matmat(current, P1));
        const index_t m2 = detail::pairwise_match(A1, params_.theta, a2);
        agg.resize(a1.size());
        for (std::size_t i = 0; i < a1.size(); ++i) agg[i] = a2[a1[i]];
        n_agg = m2;
      } else {
        n_agg = detail::aggregate(current, params_.theta, agg);
      }
      if (n_agg >= current.nrows()) {
        std::fprintf(stderr,
                     "amg: coarsening stagnated at level %zu (n=%d); solving this "
                     "level densely\n",
                     levels_.size(), current.nrows());
        break;
      }
      Level lv;
      lv.P = detail::piecewise_constant_prolongation(agg, n_agg);
      CsrMatrix coarse = matmat(transpose(lv.P), matmat(current, lv.P));
      lv.A = std::move(current);
      lv.inv_diag = diagonal(lv.A);
      for (std::size_t i = 0; i < lv.inv_diag.size(); ++i) {
        require(lv.inv_diag[i] != 0.0,
                detail::strfmt("amg: zero diagonal at row %zu", i));
        lv.inv_diag[i] = 1.0 / lv.inv_diag[i];
      }
      levels_.push_back(std::move(lv));
      current = std::move(coarse);
    }
    n_ = levels_.empty() ? current.nrows() : levels_.front().A.nrows();
    coarse_op_ = std::move(current);
    coarse_lu_ = std::make_unique<LuFactor>(DenseMatrix::from_csr(coarse_op_));
    work_r_.resize(levels_.size());
    work_z_.resize(levels_.size());
  }

  void apply(const DenseVector& r, DenseVector& z) override {
    require(static_cast<index_t>(r.size()) == n_, "amg: size mismatch");
    cycle(0, r, z);
  }

  index_t size() const override { return n_; }
  std::string name() const override {
    return detail::strfmt("amg(levels=%zu, theta=%g)", levels_.size() + 1, params_.theta);
  }

  std::size_t num_levels() const { return levels_.size() + 1; }

  void describe(std::ostream& os, int indent) const override {
    os << std::string(static_cast<std::size_t>(indent), ' ') << name()
       << detail::strfmt(", coarse n=%d\n", coarse_op_.nrows());
  }

private:
  struct Level {
    CsrMatrix A;
    CsrMatrix P;
    DenseVector inv_diag;
  };

  void cycle(std::size_t l, const DenseVector& r, DenseVector& z) {
    if (l == levels_.size()) {
      z.resize(r.size());
      coarse_lu_->solve(r.data(), z.data());
      return;
    }
    const Level& lv = levels_[l];
    const double w = params_.omega;
    DenseVector& res = work_r_[l];
    DenseVector& zc = work_z_[l];
    // pre-smooth from zero: first sweep is z = w D^-1 r
    z.resize(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) z[i] = w * lv.inv_diag[i] * r[i];
    for (index_t s = 1; s < params_.sweeps; ++s) smooth(lv, r, z, res);
    // coarse correction on the residual; visited once (V) or twice (W)
    const index_t visits =
        l + 1 == levels_.size() ? 1 : std::max<index_t>(1, params_.cycle);
    for (index_t v = 0; v < visits; ++v) {
      spmv(lv.A, z, res);
      for (std::size_t i = 0; i < res.size(); ++i) res[i] = r[i] - res[i];
      const DenseVector rc = spmv_transpose(lv.P, res);
      cycle(l + 1, rc, zc);
      const DenseVector corr = spmv(lv.P, zc);
      axpy(params_.over_correction, corr, z);
    }
    // post-smooth
    for (index_t s = 0; s < params_.sweeps; ++s) smooth(lv, r, z, res);
  }

  void smooth(const Level& lv, const DenseVector& r, DenseVector& z, DenseVector& res) {
    spmv(lv.A, z, res);
    for (std::size_t i = 0; i < z.size(); ++i)
      z[i] += params_.omega * lv.inv_diag[i] * (r[i] - res[i]);
  }

  AmgParams params_;
  index_t n_ = 0;
  std::vector<Level> levels_;
  CsrMatrix coarse_op_;
  std::unique_ptr<LuFactor> coarse_lu_;
  std::vector<DenseVector> work_r_;
  std::vector<DenseVector> work_z_;
};

inline PcPtr pc_amg(const CsrMatrix& A, AmgParams params = {}) {
  return std::make_unique<AmgPc>(A, params);
}

}  // namespace pctk
