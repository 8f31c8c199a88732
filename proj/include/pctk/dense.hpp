/// \file dense.hpp
/// \brief Small dense matrices with LU solves, used for block-Jacobi blocks,
/// the desk-scale direct preconditioner and AMG coarsest levels.

#pragma once

#include <cmath>
#include <utility>

#include "pctk/csr.hpp"

namespace pctk {

class DenseMatrix {
public:
  DenseMatrix() = default;
  DenseMatrix(index_t rows, index_t cols)
      : rows_(rows), cols_(cols),
        data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0) {}

  static DenseMatrix from_csr(const CsrMatrix& A) {
    DenseMatrix D(A.nrows(), A.ncols());
    for (index_t i = 0; i < A.nrows(); ++i)
      for (index_t k = A.row_offsets()[i]; k < A.row_offsets()[i + 1]; ++k)
        D(i, A.col_indices()[k]) = A.values()[k];
    return D;
  }

  index_t rows() const { return rows_; }
  index_t cols() const { return cols_; }

  double& operator()(index_t i, index_t j) {
    return data_[static_cast<std::size_t>(i) * cols_ + j];
  }
  double operator()(index_t i, index_t j) const {
    return data_[static_cast<std::size_t>(i) * cols_ + j];
  }

private:
  index_t rows_ = 0;
  index_t cols_ = 0;
  std::vector<double> data_;
};

/// LU factorization with partial pivoting. Throws on a (numerically) zero
/// pivot, identifying the offending column.
class LuFactor {
public:
  explicit LuFactor(DenseMatrix A) : lu_(std::move(A)) {
    require(lu_.rows() == lu_.cols(), "LuFactor: matrix must be square");
    const index_t n = lu_.rows();
    perm_.resize(static_cast<std::size_t>(n));
    for (index_t i = 0; i < n; ++i) perm_[i] = i;
    for (index_t k = 0; k < n; ++k) {
      index_t piv = k;
      double best = std::fabs(lu_(k, k));
      for (index_t i = k + 1; i < n; ++i) {
        const double v = std::fabs(lu_(i, k));
        if (v > best) {
          best = v;
          piv = i;
        }
      }
      if (best < 1e-300)
        throw Error(detail::strfmt("dense LU: singular pivot at column %d", k));
      if (piv != k) {
        std::swap(perm_[piv], perm_[k]);
        for (index_t j = 0; j < n; ++j) std::swap(lu_(piv, j), lu_(k, j));
      }
      const double inv_piv = 1.0 / lu_(k, k);
      for (index_t i = k + 1; i < n; ++i) {
        const double f = lu_(i, k) * inv_piv;
        lu_(i, k) = f;
        for (index_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
      }
    }
  }

  index_t size() const { return lu_.rows(); }

  void solve(const double* b, double* x) const {
    const index_t n = lu_.rows();
    // Pb -> forward -> backward
    for (index_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
    for (index_t i = 1; i < n; ++i) {
      double s = x[i];
      for (index_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
      x[i] = s;
    }
    for (index_t i = n - 1; i >= 0; --i) {
      double s = x[i];
      for (index_t j = i + 1; j < n; ++j) s -= lu_(i, j) * x[j];
      x[i] = s / lu_(i, i);
    }
  }

  DenseVector solve(const DenseVector& b) const {
    require(static_cast<index_t>(b.size()) == lu_.rows(), "LuFactor::solve: size mismatch");
    DenseVector x(b.size());
    solve(b.data(), x.data());
    return x;
  }

private:
  DenseMatrix lu_;
  std::vector<index_t> perm_;
};

}  // namespace pctk
