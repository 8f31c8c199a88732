// Dense reference oracles for the test suite, built on Eigen so they are
// independent of the library's sparse kernels and solvers.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <random>

#include "pctk/pctk.hpp"

namespace oracle {

using pctk::CsrMatrix;
using pctk::DenseVector;
using pctk::index_t;

inline Eigen::MatrixXd to_eigen(const CsrMatrix& A) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(A.nrows(), A.ncols());
  for (index_t i = 0; i < A.nrows(); ++i)
    for (index_t k = A.row_offsets()[i]; k < A.row_offsets()[i + 1]; ++k)
      M(i, A.col_indices()[k]) = A.values()[k];
  return M;
}

inline Eigen::VectorXd to_eigen(const DenseVector& v) {
  Eigen::VectorXd x(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) x[static_cast<Eigen::Index>(i)] = v[i];
  return x;
}

inline DenseVector from_eigen(const Eigen::VectorXd& v) {
  DenseVector x(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) x[static_cast<std::size_t>(i)] = v[i];
  return x;
}

inline CsrMatrix csr_from_eigen(const Eigen::MatrixXd& M, double drop_tol = 0.0) {
  std::vector<pctk::Triplet> t;
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j)
      if (std::abs(M(i, j)) > drop_tol)
        t.push_back({static_cast<index_t>(i), static_cast<index_t>(j), M(i, j)});
  return CsrMatrix::from_triplets(static_cast<index_t>(M.rows()),
                                  static_cast<index_t>(M.cols()), std::move(t));
}

inline DenseVector dense_solve(const CsrMatrix& A, const DenseVector& b) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(to_eigen(A));
  return from_eigen(lu.solve(to_eigen(b)));
}

inline Eigen::Index rank(const CsrMatrix& A, double threshold = 1e-10) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(to_eigen(A));
  lu.setThreshold(threshold);
  return lu.rank();
}

inline double min_eigenvalue_sym(const CsrMatrix& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(A));
  return es.eigenvalues().minCoeff();
}

inline Eigen::VectorXcd eigenvalues(const Eigen::MatrixXd& M) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, /*computeEigenvectors=*/false);
  return es.eigenvalues();
}

inline double spectral_radius(const Eigen::MatrixXd& M) {
  return eigenvalues(M).cwiseAbs().maxCoeff();
}

// Random canonical CSR with roughly the given density (mt19937: test-local
// randomness, no cross-run reproducibility required).
inline CsrMatrix random_csr(std::mt19937& gen, index_t rows, index_t cols, double density) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::vector<pctk::Triplet> t;
  for (index_t i = 0; i < rows; ++i)
    for (index_t j = 0; j < cols; ++j)
      if (unit(gen) < density) t.push_back({i, j, val(gen)});
  return CsrMatrix::from_triplets(rows, cols, std::move(t));
}

// Random dense SPD matrix as CSR: M^T M + n I.
inline CsrMatrix random_spd(std::mt19937& gen, index_t n) {
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  Eigen::MatrixXd M(n, n);
  for (index_t i = 0; i < n; ++i)
    for (index_t j = 0; j < n; ++j) M(i, j) = val(gen);
  Eigen::MatrixXd S = M.transpose() * M + static_cast<double>(n) * Eigen::MatrixXd::Identity(n, n);
  return csr_from_eigen(S);
}

inline double max_abs_diff(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  return (A - B).cwiseAbs().maxCoeff();
}

inline double rel_diff(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const double scale = std::max(1e-300, B.cwiseAbs().maxCoeff());
  return (A - B).cwiseAbs().maxCoeff() / scale;
}

}  // namespace oracle
