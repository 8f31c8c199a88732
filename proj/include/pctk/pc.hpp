/// \file pc.hpp
/// \brief Preconditioner interface, the simple smoothers (none, Jacobi,
/// block Jacobi) and the desk-scale dense direct preconditioner.

#pragma once

#include <functional>
#include <memory>
#include <ostream>

#include "pctk/dense.hpp"
#include "pctk/layout.hpp"
#include "pctk/options.hpp"

namespace pctk {

/// Aggregate usage counters for a nested solve; run reports embed a tree of
/// these (label = options prefix of the inner solver).
struct SubSolveStats {
  std::string label;
  long applications = 0;
  long iterations = 0;
  std::vector<SubSolveStats> children;
};

/// Approximate action z = P^{-1} r.
///
/// Stationary preconditioners apply a fixed linear operator; preconditioners
/// wrapping inner iterative solves are nonstationary and require a flexible
/// outer method. apply() on distinct instances is safe concurrently;
/// instances owning inner solvers are single-use-at-a-time.
class Preconditioner {
public:
  virtual ~Preconditioner() = default;

  virtual void apply(const DenseVector& r, DenseVector& z) = 0;

  virtual index_t size() const = 0;

  /// Short type tag, e.g. "jacobi" or "fieldsplit(schur)".
  virtual std::string name() const = 0;

  virtual bool stationary() const { return true; }

  /// Nested solve counters, one entry per inner solver (recursive).
  virtual void collect_stats(std::vector<SubSolveStats>&) const {}

  /// Multi-line configuration tree for reports and `info`-style output.
  virtual void describe(std::ostream& os, int indent) const {
    os << std::string(static_cast<std::size_t>(indent), ' ') << name() << "\n";
  }
};

using PcPtr = std::unique_ptr<Preconditioner>;

/// Pressure convection-diffusion operators on the pressure space: mass Mp,
/// Laplacian Ap and convection-diffusion Fp, with boundary conditions already
/// applied by the producer. The PCD preconditioner treats them as opaque.
struct PcdContext {
  CsrMatrix Mp;
  CsrMatrix Ap;
  CsrMatrix Fp;
};

/// Optional auxiliary operators threaded through preconditioner construction.
struct AuxOperators {
  std::shared_ptr<const CsrMatrix> user_schur;  ///< user Schur preconditioning matrix
  std::shared_ptr<const PcdContext> pcd;        ///< PCD operators
};

/// What a preconditioner is built on: the (preconditioning) matrix, field
/// metadata when available, and auxiliary operators.
struct PcInput {
  std::shared_ptr<const CsrMatrix> matrix;
  std::shared_ptr<const SplittableMatrix> split;  ///< null for bare matrices
  AuxOperators aux;
};

inline PcInput make_pc_input(std::shared_ptr<const SplittableMatrix> M,
                             AuxOperators aux = {}) {
  PcInput in;
  require(M != nullptr, "make_pc_input: null matrix");
  in.matrix = std::shared_ptr<const CsrMatrix>(M, &M->matrix);
  in.split = std::move(M);
  in.aux = std::move(aux);
  return in;
}

inline PcInput make_pc_input(std::shared_ptr<const CsrMatrix> A, AuxOperators aux = {}) {
  PcInput in;
  require(A != nullptr, "make_pc_input: null matrix");
  in.matrix = std::move(A);
  in.split = nullptr;
  in.aux = std::move(aux);
  return in;
}

/// Factory signature used for recursive composition: the options tree alone
/// determines the nested preconditioner structure.
using PcFactory = std::function<PcPtr(const OptionsScope&, const PcInput&)>;

// ---------------------------------------------------------------------------

class IdentityPc final : public Preconditioner {
public:
  explicit IdentityPc(index_t n) : n_(n) {}
  void apply(const DenseVector& r, DenseVector& z) override { z = r; }
  index_t size() const override { return n_; }
  std::string name() const override { return "none"; }

private:
  index_t n_;
};

inline PcPtr pc_none(index_t n) { return std::make_unique<IdentityPc>(n); }

class JacobiPc final : public Preconditioner {
public:
  explicit JacobiPc(const CsrMatrix& A) : inv_diag_(diagonal(A)) {
    for (std::size_t i = 0; i < inv_diag_.size(); ++i) {
      if (inv_diag_[i] == 0.0)
        throw Error(detail::strfmt("jacobi setup: zero diagonal at row %zu", i));
      inv_diag_[i] = 1.0 / inv_diag_[i];
    }
  }

  void apply(const DenseVector& r, DenseVector& z) override {
    require(r.size() == inv_diag_.size(), "jacobi: size mismatch");
    z.resize(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) z[i] = inv_diag_[i] * r[i];
  }

  index_t size() const override { return static_cast<index_t>(inv_diag_.size()); }
  std::string name() const override { return "jacobi"; }

private:
  DenseVector inv_diag_;
};

inline PcPtr pc_jacobi(const CsrMatrix& A) { return std::make_unique<JacobiPc>(A); }

/// Fixed-size algebraic diagonal blocks, each solved by small dense LU.
class BlockJacobiPc final : public Preconditioner {
public:
  BlockJacobiPc(const CsrMatrix& A, index_t block_size) : n_(A.nrows()), bs_(block_size) {
    require(A.nrows() == A.ncols(), "bjacobi: matrix must be square");
    require(block_size > 0, "bjacobi: block size must be positive");
    require(n_ % bs_ == 0,
            detail::strfmt("bjacobi: %d rows not divisible by block size %d", n_, bs_));
    const index_t nblocks = n_ / bs_;
    blocks_.reserve(static_cast<std::size_t>(nblocks));
    for (index_t b = 0; b < nblocks; ++b) {
      DenseMatrix D(bs_, bs_);
      const index_t lo = b * bs_;
      for (index_t i = 0; i < bs_; ++i) {
        const index_t gi = lo + i;
        for (index_t k = A.row_offsets()[gi]; k < A.row_offsets()[gi + 1]; ++k) {
          const index_t gj = A.col_indices()[k];
          if (gj >= lo && gj < lo + bs_) D(i, gj - lo) = A.values()[k];
        }
      }
      try {
        blocks_.emplace_back(std::move(D));
      } catch (const Error&) {
        throw Error(detail::strfmt("bjacobi setup: singular diagonal block %d", b));
      }
    }
  }

  void apply(const DenseVector& r, DenseVector& z) override {
    require(static_cast<index_t>(r.size()) == n_, "bjacobi: size mismatch");
    z.resize(r.size());
    for (std::size_t b = 0; b < blocks_.size(); ++b)
      blocks_[b].solve(r.data() + b * static_cast<std::size_t>(bs_),
                       z.data() + b * static_cast<std::size_t>(bs_));
  }

  index_t size() const override { return n_; }
  std::string name() const override { return detail::strfmt("bjacobi(block_size=%d)", bs_); }

private:
  index_t n_;
  index_t bs_;
  std::vector<LuFactor> blocks_;
};

inline PcPtr pc_bjacobi(const CsrMatrix& A, index_t block_size) {
  return std::make_unique<BlockJacobiPc>(A, block_size);
}

/// Dense LU of the whole operator. Desk-scale guardrail: refuses more than
/// 5000 rows.
class DenseLuPc final : public Preconditioner {
public:
  static constexpr index_t kMaxRows = 5000;

  explicit DenseLuPc(const CsrMatrix& A)
      : n_(A.nrows()), lu_((check_size(A), DenseMatrix::from_csr(A))) {}

  void apply(const DenseVector& r, DenseVector& z) override {
    require(static_cast<index_t>(r.size()) == n_, "lu: size mismatch");
    z.resize(r.size());
    lu_.solve(r.data(), z.data());
  }

  index_t size() const override { return n_; }
  std::string name() const override { return "lu"; }

private:
  static void check_size(const CsrMatrix& A) {
    require(A.nrows() == A.ncols(), "lu: matrix must be square");
    require(A.nrows() <= kMaxRows,
            detail::strfmt("pc_type=lu is limited to %d rows (got %d)", kMaxRows,
                           A.nrows()));
  }

  index_t n_;
  LuFactor lu_;
};

inline PcPtr pc_lu(const CsrMatrix& A) { return std::make_unique<DenseLuPc>(A); }

/// Test/tool helper: materializes the action of a preconditioner as a dense
/// matrix by applying it to unit vectors.
inline DenseMatrix pc_to_dense(Preconditioner& pc) {
  const index_t n = pc.size();
  DenseMatrix M(n, n);
  DenseVector e(static_cast<std::size_t>(n), 0.0), z;
  for (index_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    pc.apply(e, z);
    for (index_t i = 0; i < n; ++i) M(i, j) = z[i];
    e[j] = 0.0;
  }
  return M;
}

}  // namespace pctk
