/// \file ilu.hpp
/// \brief Zero-fill incomplete LU and incomplete Cholesky on the operator's
/// own sparsity pattern.

#pragma once

#include "pctk/pc.hpp"

namespace pctk {

namespace detail {

struct ZeroPivot {
  index_t row;
};

}  // namespace detail

/// ILU(0): incomplete LU restricted to A's pattern. apply = forward/back
/// substitution. A positive shift (option {prefix}pc_factor_shift) adds
/// shift*I and retries the factorization once on a zero pivot.
class Ilu0Pc final : public Preconditioner {
public:
  explicit Ilu0Pc(const CsrMatrix& A, double shift = 0.0) {
    require(A.nrows() == A.ncols(), "ilu0: matrix must be square");
    try {
      factor(A);
    } catch (const detail::ZeroPivot& zp) {
      if (shift > 0.0) {
        try {
          factor(add_diagonal_shift(A, shift));
          shifted_ = true;
        } catch (const detail::ZeroPivot& zp2) {
          throw Error(detail::strfmt(
              "ilu0 setup: zero pivot at row %d even with pc_factor_shift", zp2.row));
        }
      } else {
        throw Error(detail::strfmt(
            "ilu0 setup: zero pivot at row %d (set pc_factor_shift to retry with a "
            "diagonal shift)",
            zp.row));
      }
    }
  }

  void apply(const DenseVector& r, DenseVector& z) override {
    const index_t n = lu_.nrows();
    require(static_cast<index_t>(r.size()) == n, "ilu0: size mismatch");
    z = r;
    const auto& off = lu_.row_offsets();
    const auto& col = lu_.col_indices();
    const auto& val = lu_.values();
    // L z = r (unit diagonal)
    for (index_t i = 0; i < n; ++i) {
      double s = z[i];
      for (index_t k = off[i]; k < off[i + 1] && col[k] < i; ++k) s -= val[k] * z[col[k]];
      z[i] = s;
    }
    // U x = z
    for (index_t i = n - 1; i >= 0; --i) {
      double s = z[i];
      double dii = 0.0;
      for (index_t k = off[i]; k < off[i + 1]; ++k) {
        if (col[k] > i)
          s -= val[k] * z[col[k]];
        else if (col[k] == i)
          dii = val[k];
      }
      z[i] = s / dii;
    }
  }

  index_t size() const override { return lu_.nrows(); }
  std::string name() const override { return shifted_ ? "ilu0(shifted)" : "ilu0"; }
  bool used_shift() const { return shifted_; }

private:
  void factor(const CsrMatrix& A) {
    const index_t n = A.nrows();
    CsrMatrix lu = A;
    const auto& off = lu.row_offsets();
    const auto& col = lu.col_indices();
    auto& val = lu.values();
    std::vector<index_t> diag_pos(static_cast<std::size_t>(n), -1);
    for (index_t i = 0; i < n; ++i)
      for (index_t k = off[i]; k < off[i + 1]; ++k)
        if (col[k] == i) diag_pos[i] = k;
    for (index_t i = 0; i < n; ++i)
      if (diag_pos[i] < 0) throw detail::ZeroPivot{i};  // structurally missing diagonal

    for (index_t i = 0; i < n; ++i) {
      for (index_t ki = off[i]; ki < off[i + 1] && col[ki] < i; ++ki) {
        const index_t k = col[ki];
        const double ukk = val[diag_pos[k]];
        if (std::fabs(ukk) < 1e-300) throw detail::ZeroPivot{k};
        const double aik = val[ki] / ukk;
        val[ki] = aik;
        // subtract aik * row_k restricted to row_i's pattern right of k
        index_t pi = ki + 1;
        index_t pk = diag_pos[k] + 1;
        while (pi < off[i + 1] && pk < off[k + 1]) {
          if (col[pi] == col[pk]) {
            val[pi] -= aik * val[pk];
            ++pi;
            ++pk;
          } else if (col[pi] < col[pk]) {
            ++pi;
          } else {
            ++pk;
          }
        }
      }
      if (std::fabs(val[diag_pos[i]]) < 1e-300) throw detail::ZeroPivot{i};
    }
    lu_ = std::move(lu);
  }

  CsrMatrix lu_;
  bool shifted_ = false;
};

inline PcPtr pc_ilu0(const CsrMatrix& A, double shift = 0.0) {
  return std::make_unique<Ilu0Pc>(A, shift);
}

/// IC(0): incomplete Cholesky on the (symmetric) pattern of A; the factor L
/// lives on the lower triangle of that pattern. apply = L^-T L^-1 r.
class Ic0Pc final : public Preconditioner {
public:
  explicit Ic0Pc(const CsrMatrix& A, double shift = 0.0) {
    require(A.nrows() == A.ncols(), "ic0: matrix must be square");
    check_symmetric_pattern(A);
    try {
      factor(A);
    } catch (const detail::ZeroPivot& zp) {
      if (shift > 0.0) {
        try {
          factor(add_diagonal_shift(A, shift));
          shifted_ = true;
        } catch (const detail::ZeroPivot& zp2) {
          throw Error(detail::strfmt(
              "ic0 setup: non-positive pivot at row %d even with pc_factor_shift",
              zp2.row));
        }
      } else {
        throw Error(detail::strfmt(
            "ic0 setup: non-positive pivot at row %d (set pc_factor_shift to retry)",
            zp.row));
      }
    }
  }

  void apply(const DenseVector& r, DenseVector& z) override {
    const index_t n = L_.nrows();
    require(static_cast<index_t>(r.size()) == n, "ic0: size mismatch");
    z = r;
    const auto& off = L_.row_offsets();
    const auto& col = L_.col_indices();
    const auto& val = L_.values();
    // L y = r; the last entry of each row is the diagonal
    for (index_t i = 0; i < n; ++i) {
      double s = z[i];
      for (index_t k = off[i]; k < off[i + 1] - 1; ++k) s -= val[k] * z[col[k]];
      z[i] = s / val[off[i + 1] - 1];
    }
    // L^T x = y
    for (index_t i = n - 1; i >= 0; --i) {
      z[i] /= val[off[i + 1] - 1];
      for (index_t k = off[i]; k < off[i + 1] - 1; ++k) z[col[k]] -= val[k] * z[i];
    }
  }

  index_t size() const override { return L_.nrows(); }
  std::string name() const override { return shifted_ ? "ic0(shifted)" : "ic0"; }

private:
  static void check_symmetric_pattern(const CsrMatrix& A) {
    const CsrMatrix At = transpose(A);
    require(At.row_offsets() == A.row_offsets() && At.col_indices() == A.col_indices(),
            "ic0: matrix pattern is not symmetric");
  }

  void factor(const CsrMatrix& A) {
    const index_t n = A.nrows();
    // lower-triangular pattern of A, diagonal included (and required)
    std::vector<index_t> offsets(static_cast<std::size_t>(n) + 1, 0);
    std::vector<index_t> cols;
    std::vector<double> vals;
    for (index_t i = 0; i < n; ++i) {
      bool has_diag = false;
      for (index_t k = A.row_offsets()[i]; k < A.row_offsets()[i + 1]; ++k) {
        const index_t j = A.col_indices()[k];
        if (j > i) break;
        cols.push_back(j);
        vals.push_back(A.values()[k]);
        if (j == i) has_diag = true;
      }
      if (!has_diag) throw detail::ZeroPivot{i};
      offsets[i + 1] = static_cast<index_t>(cols.size());
    }
    CsrMatrix L(n, n, std::move(offsets), std::move(cols), std::move(vals));
    const auto& off = L.row_offsets();
    const auto& col = L.col_indices();
    auto& val = L.values();
    for (index_t i = 0; i < n; ++i) {
      for (index_t ki = off[i]; ki < off[i + 1]; ++ki) {
        const index_t j = col[ki];
        // dot of rows i and j over columns < j
        double s = 0.0;
        index_t pi = off[i];
        index_t pj = off[j];
        while (pi < off[i + 1] && pj < off[j + 1] && col[pi] < j && col[pj] < j) {
          if (col[pi] == col[pj]) {
            s += val[pi] * val[pj];
            ++pi;
            ++pj;
          } else if (col[pi] < col[pj]) {
            ++pi;
          } else {
            ++pj;
          }
        }
        if (j < i) {
          const double ljj = val[off[j + 1] - 1];
          if (std::fabs(ljj) < 1e-300) throw detail::ZeroPivot{j};
          val[ki] = (val[ki] - s) / ljj;
        } else {  // diagonal
          const double d = val[ki] - s;
          if (!(d > 0.0)) throw detail::ZeroPivot{i};
          val[ki] = std::sqrt(d);
        }
      }
    }
    L_ = std::move(L);
  }

  CsrMatrix L_;
  bool shifted_ = false;
};

inline PcPtr pc_ic0(const CsrMatrix& A, double shift = 0.0) {
  return std::make_unique<Ic0Pc>(A, shift);
}

}  // namespace pctk
