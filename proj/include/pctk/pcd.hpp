/// \file pcd.hpp
/// \brief Pressure convection-diffusion approximation of the Schur complement
/// inverse, in the two standard operator orderings.
///
/// Given pressure-space mass Mp, Laplacian Ap and convection-diffusion Fp
/// (boundary conditions already applied by the producer):
///
///   vX:  z = sign * Mp^-1 ( Fp ( Ap^-1 r ) )
///   vY:  z = sign * Ap^-1 ( Fp ( Mp^-1 r ) )
///
/// The Mp and Ap solves are sub-solvers configured on child scopes pcd_mp_
/// and pcd_ap_. The default sign is -1, matching the convention in which the
/// Navier-Stokes pressure Schur complement is negative definite; it is
/// configurable via {prefix}pcd_sign.

#pragma once

#include "pctk/solver.hpp"

namespace pctk {

enum class PcdVariant { vX, vY };

class PcdPc final : public Preconditioner {
public:
  PcdPc(std::shared_ptr<const PcdContext> ctx, PcdVariant variant,
        const OptionsScope& scope, const PcFactory& factory)
      : ctx_(std::move(ctx)), variant_(variant) {
    require(ctx_ != nullptr, "pcd: null context");
    n_ = ctx_->Mp.nrows();
    require(ctx_->Mp.nrows() == ctx_->Mp.ncols() && ctx_->Ap.nrows() == ctx_->Ap.ncols() &&
                ctx_->Fp.nrows() == ctx_->Fp.ncols(),
            "pcd setup: Mp, Ap, Fp must be square");
    require(ctx_->Ap.nrows() == n_ && ctx_->Fp.nrows() == n_,
            detail::strfmt("pcd setup: dimension mismatch (Mp %d, Ap %d, Fp %d)",
                           ctx_->Mp.nrows(), ctx_->Ap.nrows(), ctx_->Fp.nrows()));
    sign_ = scope.get_real("pcd_sign", -1.0);

    auto mp = std::shared_ptr<const CsrMatrix>(ctx_, &ctx_->Mp);
    auto ap = std::shared_ptr<const CsrMatrix>(ctx_, &ctx_->Ap);
    const OptionsScope mp_scope = scope.child("pcd_mp");
    const OptionsScope ap_scope = scope.child("pcd_ap");
    mp_solve_ = std::make_unique<NestedSolver>(
        mp_scope.prefix(), solver_from_options(mp_scope, LinearOperator::from_csr(mp),
                                               factory, make_pc_input(mp)));
    ap_solve_ = std::make_unique<NestedSolver>(
        ap_scope.prefix(), solver_from_options(ap_scope, LinearOperator::from_csr(ap),
                                               factory, make_pc_input(ap)));
  }

  void apply(const DenseVector& r, DenseVector& z) override {
    require(static_cast<index_t>(r.size()) == n_, "pcd: size mismatch");
    DenseVector t1, t2;
    if (variant_ == PcdVariant::vX) {
      ap_solve_->solve_zero(r, t1);
      spmv(ctx_->Fp, t1, t2);
      mp_solve_->solve_zero(t2, z);
    } else {
      mp_solve_->solve_zero(r, t1);
      spmv(ctx_->Fp, t1, t2);
      ap_solve_->solve_zero(t2, z);
    }
    if (sign_ != 1.0) scal(sign_, z);
  }

  index_t size() const override { return n_; }

  std::string name() const override {
    return detail::strfmt("pcd_%s(sign=%g)", variant_ == PcdVariant::vX ? "vx" : "vy",
                          sign_);
  }

  bool stationary() const override {
    return mp_solve_->effectively_stationary() && ap_solve_->effectively_stationary();
  }

  void collect_stats(std::vector<SubSolveStats>& out) const override {
    out.push_back(mp_solve_->stats());
    out.push_back(ap_solve_->stats());
  }

  void describe(std::ostream& os, int indent) const override {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    os << pad << name() << "\n";
    os << pad << "  Mp solve: ";
    mp_solve_->solver().describe(os, 0);
    os << pad << "  Ap solve: ";
    ap_solve_->solver().describe(os, 0);
  }

private:
  std::shared_ptr<const PcdContext> ctx_;
  PcdVariant variant_;
  index_t n_ = 0;
  double sign_ = -1.0;
  std::unique_ptr<NestedSolver> mp_solve_;
  std::unique_ptr<NestedSolver> ap_solve_;
};

}  // namespace pctk
