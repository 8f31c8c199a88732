/// \file csr.hpp
/// \brief Compressed sparse row storage and the sparse kernels built on it.
///
/// CSR is the only operator storage in the library. Canonical form (per-row
/// column indices strictly increasing, no duplicates) is enforced at
/// construction; kernels may assume it and must preserve it.

#pragma once

#include <algorithm>
#include <numeric>
#include <utility>

#include "pctk/common.hpp"

namespace pctk {

struct Triplet {
  index_t row = 0;
  index_t col = 0;
  double value = 0.0;
};

class CsrMatrix {
public:
  CsrMatrix() = default;

  /// Takes ownership of raw CSR arrays; validates canonical form.
  CsrMatrix(index_t nrows, index_t ncols, std::vector<index_t> row_offsets,
            std::vector<index_t> col_indices, std::vector<double> values)
      : nrows_(nrows),
        ncols_(ncols),
        row_offsets_(std::move(row_offsets)),
        col_indices_(std::move(col_indices)),
        values_(std::move(values)) {
    validate();
  }

  /// Builds canonical CSR from an arbitrary (unsorted, possibly duplicated)
  /// triplet list; duplicate entries are summed.
  static CsrMatrix from_triplets(index_t nrows, index_t ncols,
                                 std::vector<Triplet> triplets) {
    for (const Triplet& t : triplets) {
      require(t.row >= 0 && t.row < nrows && t.col >= 0 && t.col < ncols,
              detail::strfmt("from_triplets: entry (%d, %d) outside %d x %d",
                             t.row, t.col, nrows, ncols));
    }
    std::sort(triplets.begin(), triplets.end(),
              [](const Triplet& a, const Triplet& b) {
                return a.row != b.row ? a.row < b.row : a.col < b.col;
              });
    std::vector<index_t> offsets(static_cast<std::size_t>(nrows) + 1, 0);
    std::vector<index_t> cols;
    std::vector<double> vals;
    cols.reserve(triplets.size());
    vals.reserve(triplets.size());
    std::size_t k = 0;
    for (index_t r = 0; r < nrows; ++r) {
      offsets[r] = static_cast<index_t>(cols.size());
      while (k < triplets.size() && triplets[k].row == r) {
        const index_t c = triplets[k].col;
        double v = triplets[k].value;
        ++k;
        while (k < triplets.size() && triplets[k].row == r &&
               triplets[k].col == c) {
          v += triplets[k].value;
          ++k;
        }
        cols.push_back(c);
        vals.push_back(v);
      }
    }
    offsets[nrows] = static_cast<index_t>(cols.size());
    return CsrMatrix(nrows, ncols, std::move(offsets), std::move(cols),
                     std::move(vals));
  }

  static CsrMatrix identity(index_t n) {
    std::vector<index_t> offsets(static_cast<std::size_t>(n) + 1);
    std::iota(offsets.begin(), offsets.end(), 0);
    std::vector<index_t> cols(static_cast<std::size_t>(n));
    std::iota(cols.begin(), cols.end(), 0);
    return CsrMatrix(n, n, std::move(offsets), std::move(cols),
                     std::vector<double>(static_cast<std::size_t>(n), 1.0));
  }

  static CsrMatrix zero(index_t nrows, index_t ncols) {
    return CsrMatrix(nrows, ncols,
                     std::vector<index_t>(static_cast<std::size_t>(nrows) + 1, 0),
                     {}, {});
  }

  index_t nrows() const { return nrows_; }
  index_t ncols() const { return ncols_; }
  index_t nnz() const { return static_cast<index_t>(values_.size()); }

  const std::vector<index_t>& row_offsets() const { return row_offsets_; }
  const std::vector<index_t>& col_indices() const { return col_indices_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// Value at (i, j); 0 for structurally absent entries.
  double at(index_t i, index_t j) const {
    require(i >= 0 && i < nrows_ && j >= 0 && j < ncols_, "at: index out of range");
    const auto begin = col_indices_.begin() + row_offsets_[i];
    const auto end = col_indices_.begin() + row_offsets_[i + 1];
    const auto it = std::lower_bound(begin, end, j);
    if (it == end || *it != j) return 0.0;
    return values_[static_cast<std::size_t>(it - col_indices_.begin())];
  }

private:
  void validate() const {
    require(nrows_ >= 0 && ncols_ >= 0, "CsrMatrix: negative dimension");
    require(row_offsets_.size() == static_cast<std::size_t>(nrows_) + 1,
            "CsrMatrix: row_offsets length must be nrows + 1");
    require(row_offsets_.front() == 0, "CsrMatrix: row_offsets[0] must be 0");
    require(row_offsets_.back() == static_cast<index_t>(col_indices_.size()),
            "CsrMatrix: row_offsets back must equal nnz");
    require(col_indices_.size() == values_.size(),
            "CsrMatrix: col_indices/values length mismatch");
    for (index_t r = 0; r < nrows_; ++r) {
      require(row_offsets_[r] <= row_offsets_[r + 1],
              detail::strfmt("CsrMatrix: row_offsets decrease at row %d", r));
      for (index_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
        require(col_indices_[k] >= 0 && col_indices_[k] < ncols_,
                detail::strfmt("CsrMatrix: column index out of range in row %d", r));
        require(k == row_offsets_[r] || col_indices_[k - 1] < col_indices_[k],
                detail::strfmt("CsrMatrix: row %d not strictly increasing", r));
      }
    }
  }

  index_t nrows_ = 0;
  index_t ncols_ = 0;
  std::vector<index_t> row_offsets_{0};
  std::vector<index_t> col_indices_;
  std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Kernels. All pure functions; outputs are canonical CSR.
// ---------------------------------------------------------------------------

/// y = A x
inline void spmv(const CsrMatrix& A, const DenseVector& x, DenseVector& y) {
  require(static_cast<index_t>(x.size()) == A.ncols(),
          detail::strfmt("spmv: x has length %zu, operator has %d columns",
                         x.size(), A.ncols()));
  y.assign(static_cast<std::size_t>(A.nrows()), 0.0);
  const auto& off = A.row_offsets();
  const auto& col = A.col_indices();
  const auto& val = A.values();
  for (index_t i = 0; i < A.nrows(); ++i) {
    double s = 0.0;
    for (index_t k = off[i]; k < off[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
}

inline DenseVector spmv(const CsrMatrix& A, const DenseVector& x) {
  DenseVector y;
  spmv(A, x, y);
  return y;
}

/// y = A^T x without forming the transpose.
inline void spmv_transpose(const CsrMatrix& A, const DenseVector& x, DenseVector& y) {
  require(static_cast<index_t>(x.size()) == A.nrows(),
          detail::strfmt("spmv_transpose: x has length %zu, operator has %d rows",
                         x.size(), A.nrows()));
  y.assign(static_cast<std::size_t>(A.ncols()), 0.0);
  const auto& off = A.row_offsets();
  const auto& col = A.col_indices();
  const auto& val = A.values();
  for (index_t i = 0; i < A.nrows(); ++i)
    for (index_t k = off[i]; k < off[i + 1]; ++k) y[col[k]] += val[k] * x[i];
}

inline DenseVector spmv_transpose(const CsrMatrix& A, const DenseVector& x) {
  DenseVector y;
  spmv_transpose(A, x, y);
  return y;
}

/// Exact structural transpose; values are copied bitwise, so
/// transpose(transpose(A)) == A entry for entry.
inline CsrMatrix transpose(const CsrMatrix& A) {
  const index_t m = A.nrows();
  const index_t n = A.ncols();
  std::vector<index_t> offsets(static_cast<std::size_t>(n) + 1, 0);
  const auto& off = A.row_offsets();
  const auto& col = A.col_indices();
  const auto& val = A.values();
  for (index_t k = 0; k < A.nnz(); ++k) ++offsets[col[k] + 1];
  for (index_t j = 0; j < n; ++j) offsets[j + 1] += offsets[j];
  std::vector<index_t> cols(static_cast<std::size_t>(A.nnz()));
  std::vector<double> vals(static_cast<std::size_t>(A.nnz()));
  std::vector<index_t> next(offsets.begin(), offsets.end() - 1);
  for (index_t i = 0; i < m; ++i) {
    for (index_t k = off[i]; k < off[i + 1]; ++k) {
      const index_t pos = next[col[k]]++;
      cols[pos] = i;
      vals[pos] = val[k];
    }
  }
  return CsrMatrix(n, m, std::move(offsets), std::move(cols), std::move(vals));
}

/// C = A B (Gustavson). Explicit zeros from cancellation are retained.
inline CsrMatrix matmat(const CsrMatrix& A, const CsrMatrix& B) {
  require(A.ncols() == B.nrows(),
          detail::strfmt("matmat: inner dimensions differ (%d vs %d)", A.ncols(),
                         B.nrows()));
  const index_t m = A.nrows();
  const index_t n = B.ncols();
  std::vector<index_t> offsets(static_cast<std::size_t>(m) + 1, 0);
  std::vector<index_t> cols;
  std::vector<double> vals;
  std::vector<double> accum(static_cast<std::size_t>(n), 0.0);
  std::vector<index_t> marker(static_cast<std::size_t>(n), -1);
  std::vector<index_t> row_cols;
  for (index_t i = 0; i < m; ++i) {
    row_cols.clear();
    for (index_t ka = A.row_offsets()[i]; ka < A.row_offsets()[i + 1]; ++ka) {
      const index_t k = A.col_indices()[ka];
      const double a = A.values()[ka];
      for (index_t kb = B.row_offsets()[k]; kb < B.row_offsets()[k + 1]; ++kb) {
        const index_t j = B.col_indices()[kb];
        if (marker[j] != i) {
          marker[j] = i;
          accum[j] = 0.0;
          row_cols.push_back(j);
        }
        accum[j] += a * B.values()[kb];
      }
    }
    std::sort(row_cols.begin(), row_cols.end());
    for (index_t j : row_cols) {
      cols.push_back(j);
      vals.push_back(accum[j]);
    }
    offsets[i + 1] = static_cast<index_t>(cols.size());
  }
  return CsrMatrix(m, n, std::move(offsets), std::move(cols), std::move(vals));
}

/// Submatrix over explicit row/column index lists, taken in list order.
/// The lists define the local ordering of the result; values are copied.
inline CsrMatrix extract_submatrix(const CsrMatrix& A,
                                   const std::vector<index_t>& rows,
                                   const std::vector<index_t>& cols) {
  for (index_t r : rows)
    require(r >= 0 && r < A.nrows(),
            detail::strfmt("extract_submatrix: row index %d out of range [0, %d)",
                           r, A.nrows()));
  std::vector<index_t> col_map(static_cast<std::size_t>(A.ncols()), -1);
  for (std::size_t j = 0; j < cols.size(); ++j) {
    require(cols[j] >= 0 && cols[j] < A.ncols(),
            detail::strfmt("extract_submatrix: col index %d out of range [0, %d)",
                           cols[j], A.ncols()));
    col_map[cols[j]] = static_cast<index_t>(j);
  }
  std::vector<index_t> offsets(rows.size() + 1, 0);
  std::vector<index_t> out_cols;
  std::vector<double> out_vals;
  std::vector<std::pair<index_t, double>> row_buf;
  for (std::size_t ri = 0; ri < rows.size(); ++ri) {
    row_buf.clear();
    const index_t i = rows[ri];
    for (index_t k = A.row_offsets()[i]; k < A.row_offsets()[i + 1]; ++k) {
      const index_t jj = col_map[A.col_indices()[k]];
      if (jj >= 0) row_buf.emplace_back(jj, A.values()[k]);
    }
    std::sort(row_buf.begin(), row_buf.end());
    for (const auto& [j, v] : row_buf) {
      out_cols.push_back(j);
      out_vals.push_back(v);
    }
    offsets[ri + 1] = static_cast<index_t>(out_cols.size());
  }
  return CsrMatrix(static_cast<index_t>(rows.size()),
                   static_cast<index_t>(cols.size()), std::move(offsets),
                   std::move(out_cols), std::move(out_vals));
}

/// d[i] = A[i,i]; 0 where the diagonal entry is structurally absent.
inline DenseVector diagonal(const CsrMatrix& A) {
  require(A.nrows() == A.ncols(),
          detail::strfmt("diagonal: operator is %d x %d, not square", A.nrows(),
                         A.ncols()));
  DenseVector d(static_cast<std::size_t>(A.nrows()), 0.0);
  for (index_t i = 0; i < A.nrows(); ++i)
    for (index_t k = A.row_offsets()[i]; k < A.row_offsets()[i + 1]; ++k)
      if (A.col_indices()[k] == i) d[i] = A.values()[k];
  return d;
}

/// A + shift * I on the union pattern.
inline CsrMatrix add_diagonal_shift(const CsrMatrix& A, double shift) {
  require(A.nrows() == A.ncols(), "add_diagonal_shift: matrix must be square");
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(A.nnz()) + static_cast<std::size_t>(A.nrows()));
  for (index_t i = 0; i < A.nrows(); ++i)
    for (index_t k = A.row_offsets()[i]; k < A.row_offsets()[i + 1]; ++k)
      t.push_back({i, A.col_indices()[k], A.values()[k]});
  for (index_t i = 0; i < A.nrows(); ++i) t.push_back({i, i, shift});
  return CsrMatrix::from_triplets(A.nrows(), A.ncols(), std::move(t));
}

}  // namespace pctk
