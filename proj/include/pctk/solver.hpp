/// \file solver.hpp
/// \brief Iterative solvers: restarted GMRES, flexible GMRES, CG, Richardson
/// and preonly, over an abstract operator with a preconditioner.
///
/// Convergence norms: GMRES with left preconditioning and CG monitor the
/// preconditioned residual against max(rtol * ||P^-1 b||, atol); GMRES with
/// right preconditioning, FGMRES and Richardson monitor the true residual
/// against max(rtol * ||b||, atol). Every report states which norm was used
/// and carries the recomputed true relative residual.

#pragma once

#include <cstdio>
#include <limits>
#include <memory>
#include <string>

#include "pctk/csr.hpp"
#include "pctk/pc.hpp"

namespace pctk {

/// Abstract square (or rectangular) operator; matrix-free allowed.
struct LinearOperator {
  index_t rows = 0;
  index_t cols = 0;
  std::function<void(const DenseVector&, DenseVector&)> apply_fn;

  void apply(const DenseVector& x, DenseVector& y) const {
    require(static_cast<bool>(apply_fn), "LinearOperator: no action set");
    require(static_cast<index_t>(x.size()) == cols,
            detail::strfmt("LinearOperator: input length %zu, expected %d", x.size(),
                           cols));
    apply_fn(x, y);
    require(static_cast<index_t>(y.size()) == rows,
            "LinearOperator: action produced wrong-size output");
  }

  DenseVector apply(const DenseVector& x) const {
    DenseVector y;
    apply(x, y);
    return y;
  }

  /// Non-owning adaptor; the matrix must outlive the operator.
  static LinearOperator from_csr(const CsrMatrix& A) {
    return {A.nrows(), A.ncols(),
            [&A](const DenseVector& x, DenseVector& y) { spmv(A, x, y); }};
  }

  /// Owning adaptor.
  static LinearOperator from_csr(std::shared_ptr<const CsrMatrix> A) {
    const CsrMatrix* p = A.get();
    return {p->nrows(), p->ncols(),
            [A = std::move(A)](const DenseVector& x, DenseVector& y) { spmv(*A, x, y); }};
  }
};

enum class Method { gmres, fgmres, cg, richardson, preonly };
enum class PcSide { left, right };
enum class StopReason { rtol, atol, max_it, breakdown, diverged };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::gmres: return "gmres";
    case Method::fgmres: return "fgmres";
    case Method::cg: return "cg";
    case Method::richardson: return "richardson";
    case Method::preonly: return "preonly";
  }
  return "?";
}

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::rtol: return "rtol";
    case StopReason::atol: return "atol";
    case StopReason::max_it: return "max_it";
    case StopReason::breakdown: return "breakdown";
    case StopReason::diverged: return "diverged";
  }
  return "?";
}

inline StopReason stop_reason_from_string(const std::string& s) {
  if (s == "rtol") return StopReason::rtol;
  if (s == "atol") return StopReason::atol;
  if (s == "max_it") return StopReason::max_it;
  if (s == "breakdown") return StopReason::breakdown;
  if (s == "diverged") return StopReason::diverged;
  throw Error("unknown stop reason '" + s + "'");
}

struct SolverConfig {
  Method method = Method::gmres;
  double rtol = 1e-5;
  double atol = 1e-50;  // effectively off
  index_t max_it = 10000;
  index_t restart = 30;
  PcSide side = PcSide::left;
  bool monitor = false;   ///< per-iteration residuals to stderr
  std::string label;      ///< printed by the monitor, used in nested stats
};

/// Outcome of one solve.
///
/// `reason` states why iteration stopped. `success` is true when the method
/// fulfilled its contract: tolerance reached, a happy breakdown, or the
/// completion of a fixed application count (preonly always; Richardson when
/// both tolerances are zero). Hitting max_it with tolerances active is a
/// failure.
struct SolveReport {
  StopReason reason = StopReason::diverged;
  bool success = false;
  index_t iterations = 0;
  std::vector<double> residual_history;  ///< length = iterations + 1
  std::string norm = "true";
  double true_residual_rel = std::numeric_limits<double>::infinity();
  std::vector<SubSolveStats> sub_reports;
};

namespace detail {

inline void monitor_line(const SolverConfig& cfg, index_t it, double res) {
  if (!cfg.monitor) return;
  std::fprintf(stderr, "  [%s] %4d residual %.12e\n",
               cfg.label.empty() ? "ksp" : cfg.label.c_str(), it, res);
}

inline void make_givens(double a, double b, double& c, double& s) {
  const double r = std::hypot(a, b);
  if (r == 0.0) {
    c = 1.0;
    s = 0.0;
  } else {
    c = a / r;
    s = b / r;
  }
}

inline void classify_converged(SolveReport& rep, double res, double atol) {
  rep.reason = res <= atol ? StopReason::atol : StopReason::rtol;
  rep.success = true;
}

inline void finish_true_residual(const LinearOperator& A, const DenseVector& b,
                                 const DenseVector& x, SolveReport& rep) {
  DenseVector ax;
  A.apply(x, ax);
  double rn = 0.0, bn = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double d = b[i] - ax[i];
    rn += d * d;
    bn += b[i] * b[i];
  }
  rep.true_residual_rel = bn > 0.0 ? std::sqrt(rn / bn) : std::sqrt(rn);
}

/// Shared restarted-Arnoldi driver for gmres (left/right) and fgmres.
inline SolveReport arnoldi_solve(const LinearOperator& A, const DenseVector& b,
                                 DenseVector& x, Preconditioner& pc,
                                 const SolverConfig& cfg, bool flexible) {
  const index_t n = A.rows;
  require(A.rows == A.cols, "gmres: operator must be square");
  require(static_cast<index_t>(b.size()) == n, "gmres: rhs size mismatch");
  require(pc.size() == n, "gmres: preconditioner size mismatch");
  if (x.empty()) x.assign(static_cast<std::size_t>(n), 0.0);
  require(static_cast<index_t>(x.size()) == n, "gmres: initial guess size mismatch");

  const bool left = !flexible && cfg.side == PcSide::left;
  SolveReport rep;
  rep.norm = left ? "preconditioned" : "true";

  DenseVector work, r, z;
  const double bnorm_true = norm2(b);
  double norm_scale = bnorm_true;
  if (left) {
    pc.apply(b, z);
    norm_scale = norm2(z);
  }
  if (!std::isfinite(norm_scale)) {
    rep.residual_history.push_back(norm_scale);
    return rep;  // diverged
  }
  if (bnorm_true == 0.0) {
    x.assign(static_cast<std::size_t>(n), 0.0);
    rep.reason = StopReason::atol;
    rep.success = true;
    rep.residual_history.push_back(0.0);
    rep.true_residual_rel = 0.0;
    return rep;
  }
  const double tol = std::max(cfg.rtol * norm_scale, cfg.atol);

  const index_t m = std::max<index_t>(1, cfg.restart);
  std::vector<DenseVector> V(static_cast<std::size_t>(m) + 1);
  std::vector<DenseVector> Z(flexible ? static_cast<std::size_t>(m) : 0);
  std::vector<double> H(static_cast<std::size_t>(m + 1) * m, 0.0);
  std::vector<double> gs(static_cast<std::size_t>(m) + 1, 0.0);
  std::vector<double> cs(static_cast<std::size_t>(m), 0.0);
  std::vector<double> sn(static_cast<std::size_t>(m), 0.0);
  auto Hat = [&](index_t i, index_t j) -> double& {
    return H[static_cast<std::size_t>(j) * (m + 1) + i];
  };

  index_t total_it = 0;
  bool done = false;
  while (!done) {
    A.apply(x, work);
    r.resize(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) r[i] = b[i] - work[i];
    if (left) {
      pc.apply(r, z);
      r = z;
    }
    const double beta = norm2(r);
    if (!std::isfinite(beta)) {
      if (rep.residual_history.empty()) rep.residual_history.push_back(beta);
      rep.reason = StopReason::diverged;
      break;
    }
    if (rep.residual_history.empty()) {
      rep.residual_history.push_back(beta);
      monitor_line(cfg, 0, beta);
    }
    if (beta <= tol) {
      classify_converged(rep, beta, cfg.atol);
      break;
    }
    if (total_it >= cfg.max_it) {
      rep.reason = StopReason::max_it;
      break;
    }

    V[0] = r;
    scal(1.0 / beta, V[0]);
    std::fill(gs.begin(), gs.end(), 0.0);
    gs[0] = beta;

    index_t cols = 0;
    bool happy = false;
    bool bad = false;
    double res = beta;
    while (cols < m) {
      const index_t j = cols;
      if (flexible) {
        pc.apply(V[static_cast<std::size_t>(j)], Z[static_cast<std::size_t>(j)]);
        A.apply(Z[static_cast<std::size_t>(j)], work);
      } else if (left) {
        A.apply(V[static_cast<std::size_t>(j)], z);
        pc.apply(z, work);
      } else {
        pc.apply(V[static_cast<std::size_t>(j)], z);
        A.apply(z, work);
      }
      // modified Gram-Schmidt, single pass
      for (index_t i = 0; i <= j; ++i) {
        const double h = dot(work, V[static_cast<std::size_t>(i)]);
        Hat(i, j) = h;
        axpy(-h, V[static_cast<std::size_t>(i)], work);
      }
      const double hnext = norm2(work);
      if (!std::isfinite(hnext)) {
        bad = true;
        break;
      }
      Hat(j + 1, j) = hnext;
      happy = hnext <= 1e-14 * beta;
      if (!happy) {
        V[static_cast<std::size_t>(j) + 1] = work;
        scal(1.0 / hnext, V[static_cast<std::size_t>(j) + 1]);
      }
      for (index_t i = 0; i < j; ++i) {
        const double t = cs[i] * Hat(i, j) + sn[i] * Hat(i + 1, j);
        Hat(i + 1, j) = -sn[i] * Hat(i, j) + cs[i] * Hat(i + 1, j);
        Hat(i, j) = t;
      }
      make_givens(Hat(j, j), Hat(j + 1, j), cs[j], sn[j]);
      Hat(j, j) = cs[j] * Hat(j, j) + sn[j] * Hat(j + 1, j);
      Hat(j + 1, j) = 0.0;
      gs[j + 1] = -sn[j] * gs[j];
      gs[j] *= cs[j];
      res = std::fabs(gs[j + 1]);
      ++total_it;
      rep.residual_history.push_back(res);
      monitor_line(cfg, total_it, res);
      if (!std::isfinite(res)) {
        bad = true;
        break;
      }
      cols = j + 1;
      if (res <= tol || happy || total_it >= cfg.max_it) break;
    }
    if (bad) {
      rep.reason = StopReason::diverged;
      break;
    }
    if (cols > 0) {
      // back substitution on the cols x cols triangle
      std::vector<double> y(static_cast<std::size_t>(cols), 0.0);
      for (index_t i = cols - 1; i >= 0; --i) {
        double s = gs[i];
        for (index_t k = i + 1; k < cols; ++k) s -= Hat(i, k) * y[k];
        y[i] = s / Hat(i, i);
      }
      if (flexible) {
        for (index_t k = 0; k < cols; ++k) axpy(y[k], Z[static_cast<std::size_t>(k)], x);
      } else {
        DenseVector combo(static_cast<std::size_t>(n), 0.0);
        for (index_t k = 0; k < cols; ++k) axpy(y[k], V[static_cast<std::size_t>(k)], combo);
        if (left) {
          axpy(1.0, combo, x);
        } else {
          pc.apply(combo, z);
          axpy(1.0, z, x);
        }
      }
    }
    if (res <= tol) {
      classify_converged(rep, res, cfg.atol);
      done = true;
    } else if (happy) {
      rep.reason = StopReason::breakdown;
      rep.success = true;  // happy breakdown: exact solution in the current space
      done = true;
    } else if (total_it >= cfg.max_it) {
      rep.reason = StopReason::max_it;
      done = true;
    }
    // otherwise restart
  }
  rep.iterations = total_it;
  finish_true_residual(A, b, x, rep);
  return rep;
}

}  // namespace detail

/// Restarted GMRES with modified Gram-Schmidt Arnoldi and Givens rotations.
/// Left preconditioning solves P^-1 A x = P^-1 b; cfg.side selects the side.
inline SolveReport gmres(const LinearOperator& A, const DenseVector& b, DenseVector& x,
                         Preconditioner& pc, const SolverConfig& cfg) {
  return detail::arnoldi_solve(A, b, x, pc, cfg, /*flexible=*/false);
}

/// Right-preconditioned flexible GMRES; stores the preconditioned basis so
/// the preconditioner may change between iterations (inner iterative solves).
inline SolveReport fgmres(const LinearOperator& A, const DenseVector& b, DenseVector& x,
                          Preconditioner& pc, const SolverConfig& cfg) {
  return detail::arnoldi_solve(A, b, x, pc, cfg, /*flexible=*/true);
}

/// Preconditioned conjugate gradients. The operator must be symmetric
/// positive definite; an indefinite direction surfaces as a breakdown report.
inline SolveReport cg(const LinearOperator& A, const DenseVector& b, DenseVector& x,
                      Preconditioner& pc, const SolverConfig& cfg) {
  const index_t n = A.rows;
  require(A.rows == A.cols, "cg: operator must be square");
  require(static_cast<index_t>(b.size()) == n, "cg: rhs size mismatch");
  require(pc.size() == n, "cg: preconditioner size mismatch");
  if (x.empty()) x.assign(static_cast<std::size_t>(n), 0.0);
  require(static_cast<index_t>(x.size()) == n, "cg: initial guess size mismatch");

  SolveReport rep;
  rep.norm = "preconditioned";
  const double bnorm_true = norm2(b);
  if (bnorm_true == 0.0) {
    x.assign(static_cast<std::size_t>(n), 0.0);
    rep.reason = StopReason::atol;
    rep.success = true;
    rep.residual_history.push_back(0.0);
    rep.true_residual_rel = 0.0;
    return rep;
  }
  DenseVector z, r, p, Ap;
  pc.apply(b, z);
  const double norm_scale = norm2(z);
  const double tol = std::max(cfg.rtol * norm_scale, cfg.atol);

  A.apply(x, Ap);
  r.resize(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) r[i] = b[i] - Ap[i];
  pc.apply(r, z);
  double znorm = norm2(z);
  rep.residual_history.push_back(znorm);
  detail::monitor_line(cfg, 0, znorm);
  if (!std::isfinite(znorm)) {
    rep.reason = StopReason::diverged;
    detail::finish_true_residual(A, b, x, rep);
    return rep;
  }
  if (znorm <= tol) {
    detail::classify_converged(rep, znorm, cfg.atol);
    detail::finish_true_residual(A, b, x, rep);
    return rep;
  }
  p = z;
  double rz = dot(r, z);
  index_t it = 0;
  while (it < cfg.max_it) {
    A.apply(p, Ap);
    const double pAp = dot(p, Ap);
    if (!(pAp > 0.0)) {  // catches non-SPD operators and NaN
      rep.reason = std::isfinite(pAp) ? StopReason::breakdown : StopReason::diverged;
      break;
    }
    const double alpha = rz / pAp;
    axpy(alpha, p, x);
    axpy(-alpha, Ap, r);
    pc.apply(r, z);
    znorm = norm2(z);
    ++it;
    rep.residual_history.push_back(znorm);
    detail::monitor_line(cfg, it, znorm);
    if (!std::isfinite(znorm)) {
      rep.reason = StopReason::diverged;
      break;
    }
    if (znorm <= tol) {
      detail::classify_converged(rep, znorm, cfg.atol);
      break;
    }
    const double rz_new = dot(r, z);
    if (!(rz_new > 0.0)) {  // indefinite preconditioner
      rep.reason = std::isfinite(rz_new) ? StopReason::breakdown : StopReason::diverged;
      break;
    }
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
  }
  if (it >= cfg.max_it && !rep.success && rep.reason != StopReason::breakdown &&
      rep.reason != StopReason::diverged)
    rep.reason = StopReason::max_it;
  rep.iterations = it;
  detail::finish_true_residual(A, b, x, rep);
  return rep;
}

/// Richardson iteration x <- x + P^-1 (b - A x). With both tolerances zero it
/// runs exactly max_it sweeps (smoother mode) and reports success.
inline SolveReport richardson(const LinearOperator& A, const DenseVector& b,
                              DenseVector& x, Preconditioner& pc,
                              const SolverConfig& cfg) {
  const index_t n = A.rows;
  require(A.rows == A.cols, "richardson: operator must be square");
  require(static_cast<index_t>(b.size()) == n, "richardson: rhs size mismatch");
  require(pc.size() == n, "richardson: preconditioner size mismatch");
  if (x.empty()) x.assign(static_cast<std::size_t>(n), 0.0);
  require(static_cast<index_t>(x.size()) == n, "richardson: initial guess size mismatch");

  const bool fixed_count = cfg.rtol == 0.0 && cfg.atol == 0.0;
  SolveReport rep;
  rep.norm = "true";
  const double bnorm = norm2(b);
  const double tol = std::max(cfg.rtol * bnorm, cfg.atol);

  DenseVector r, z, ax;
  A.apply(x, ax);
  r.resize(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) r[i] = b[i] - ax[i];
  double rnorm = norm2(r);
  const double rnorm0 = rnorm;
  rep.residual_history.push_back(rnorm);
  detail::monitor_line(cfg, 0, rnorm);
  index_t it = 0;
  if (!fixed_count && rnorm <= tol) {
    detail::classify_converged(rep, rnorm, cfg.atol);
  } else {
    while (it < cfg.max_it) {
      pc.apply(r, z);
      axpy(1.0, z, x);
      A.apply(x, ax);
      for (std::size_t i = 0; i < b.size(); ++i) r[i] = b[i] - ax[i];
      rnorm = norm2(r);
      ++it;
      rep.residual_history.push_back(rnorm);
      detail::monitor_line(cfg, it, rnorm);
      if (!std::isfinite(rnorm)) {
        rep.reason = StopReason::diverged;
        break;
      }
      if (!fixed_count && rnorm <= tol) {
        detail::classify_converged(rep, rnorm, cfg.atol);
        break;
      }
      if (rnorm > 1e10 * std::max(rnorm0, 1e-300)) {
        rep.reason = StopReason::diverged;
        break;
      }
      if (it >= cfg.max_it) {
        rep.reason = StopReason::max_it;
        rep.success = fixed_count;
        break;
      }
    }
    if (it >= cfg.max_it && rep.reason != StopReason::diverged && !rep.success &&
        rep.reason != StopReason::rtol && rep.reason != StopReason::atol) {
      rep.reason = StopReason::max_it;
      rep.success = fixed_count;
    }
  }
  rep.iterations = it;
  detail::finish_true_residual(A, b, x, rep);
  return rep;
}

/// Exactly one preconditioner application: x = P^-1 b. Reports max_it (the
/// requested application count was performed) with success = true.
inline SolveReport preonly(const LinearOperator& A, const DenseVector& b, DenseVector& x,
                           Preconditioner& pc, const SolverConfig& cfg) {
  const index_t n = A.rows;
  require(A.rows == A.cols, "preonly: operator must be square");
  require(static_cast<index_t>(b.size()) == n, "preonly: rhs size mismatch");
  require(pc.size() == n, "preonly: preconditioner size mismatch");
  (void)cfg;
  SolveReport rep;
  rep.norm = "true";
  pc.apply(b, x);
  rep.iterations = 1;
  if (!all_finite(x)) {
    rep.reason = StopReason::diverged;
    rep.residual_history = {norm2(b), std::numeric_limits<double>::quiet_NaN()};
    return rep;
  }
  rep.reason = StopReason::max_it;
  rep.success = true;
  DenseVector ax;
  A.apply(x, ax);
  double rn = 0.0, bn = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double d = b[i] - ax[i];
    rn += d * d;
    bn += b[i] * b[i];
  }
  rep.true_residual_rel = bn > 0.0 ? std::sqrt(rn / bn) : std::sqrt(rn);
  rep.residual_history = {std::sqrt(bn), std::sqrt(rn)};
  return rep;
}

inline SolveReport run_method(const LinearOperator& A, const DenseVector& b,
                              DenseVector& x, Preconditioner& pc,
                              const SolverConfig& cfg) {
  switch (cfg.method) {
    case Method::gmres: return gmres(A, b, x, pc, cfg);
    case Method::fgmres: return fgmres(A, b, x, pc, cfg);
    case Method::cg: return cg(A, b, x, pc, cfg);
    case Method::richardson: return richardson(A, b, x, pc, cfg);
    case Method::preonly: return preonly(A, b, x, pc, cfg);
  }
  throw Error("run_method: unknown method");
}

/// An operator, a configuration and an owned preconditioner.
class Solver {
public:
  Solver(LinearOperator A, SolverConfig cfg, PcPtr pc)
      : A_(std::move(A)), cfg_(std::move(cfg)), pc_(std::move(pc)) {
    require(pc_ != nullptr, "Solver: null preconditioner");
    require(A_.rows == A_.cols, "Solver: operator must be square");
    require(pc_->size() == A_.rows,
            detail::strfmt("Solver: preconditioner size %d vs operator size %d",
                           pc_->size(), A_.rows));
  }

  /// x is the initial guess on entry and the solution on return.
  SolveReport solve(const DenseVector& b, DenseVector& x) {
    SolveReport rep = run_method(A_, b, x, *pc_, cfg_);
    pc_->collect_stats(rep.sub_reports);
    return rep;
  }

  const SolverConfig& config() const { return cfg_; }
  const LinearOperator& op() const { return A_; }
  Preconditioner& pc() { return *pc_; }
  const Preconditioner& pc() const { return *pc_; }

  /// Stationary as a linear operation on the rhs: one preconditioner
  /// application with a stationary preconditioner.
  bool effectively_stationary() const {
    return cfg_.method == Method::preonly && pc_->stationary();
  }

  void describe(std::ostream& os, int indent) const {
    os << std::string(static_cast<std::size_t>(indent), ' ') << to_string(cfg_.method);
    if (cfg_.method != Method::preonly)
      os << detail::strfmt("(rtol=%g, atol=%g, max_it=%d", cfg_.rtol, cfg_.atol,
                           cfg_.max_it)
         << ((cfg_.method == Method::gmres || cfg_.method == Method::fgmres)
                 ? detail::strfmt(", restart=%d, side=%s", cfg_.restart,
                                  cfg_.side == PcSide::left ? "left" : "right")
                 : std::string())
         << ")";
    os << " + pc:\n";
    pc_->describe(os, indent + 2);
  }

private:
  LinearOperator A_;
  SolverConfig cfg_;
  PcPtr pc_;
};

/// A nested solver with usage accounting (the building block for composite
/// preconditioners: fieldsplit sub-solves, Schur solves, PCD solves).
class NestedSolver {
public:
  NestedSolver(std::string label, Solver solver)
      : label_(std::move(label)), solver_(std::move(solver)) {}

  /// Inner solves always start from a zero initial guess.
  void solve_zero(const DenseVector& rhs, DenseVector& out) {
    out.assign(rhs.size(), 0.0);
    last_ = solver_.solve(rhs, out);
    ++applications_;
    iterations_ += last_.iterations;
  }

  SubSolveStats stats() const {
    SubSolveStats s;
    s.label = label_;
    s.applications = applications_;
    s.iterations = iterations_;
    solver_.pc().collect_stats(s.children);
    return s;
  }

  const std::string& label() const { return label_; }
  Solver& solver() { return solver_; }
  const Solver& solver() const { return solver_; }
  const SolveReport& last() const { return last_; }
  bool effectively_stationary() const { return solver_.effectively_stationary(); }

private:
  std::string label_;
  Solver solver_;
  long applications_ = 0;
  long iterations_ = 0;
  SolveReport last_;
};

/// Builds a solver from {prefix}ksp_* keys, with the preconditioner built by
/// the supplied factory on the same scope (it reads {prefix}pc_*).
///
/// Defaults: ksp_type=gmres, ksp_rtol=1e-5, ksp_atol=1e-50, ksp_max_it=10000,
/// ksp_gmres_restart=30; gmres is left-preconditioned, fgmres right.
inline Solver solver_from_options(const OptionsScope& scope, LinearOperator A,
                                  const PcFactory& factory, const PcInput& input) {
  SolverConfig cfg;
  const std::string type = scope.get("ksp_type", "gmres");
  if (type == "gmres")
    cfg.method = Method::gmres;
  else if (type == "fgmres")
    cfg.method = Method::fgmres;
  else if (type == "cg")
    cfg.method = Method::cg;
  else if (type == "richardson")
    cfg.method = Method::richardson;
  else if (type == "preonly")
    cfg.method = Method::preonly;
  else
    throw ConfigError(scope.full_key("ksp_type"),
                      "option " + scope.full_key("ksp_type") + ": unknown solver '" +
                          type + "' (gmres|fgmres|cg|richardson|preonly)");
  cfg.rtol = scope.get_real("ksp_rtol", 1e-5);
  cfg.atol = scope.get_real("ksp_atol", 1e-50);
  cfg.max_it = scope.get_int("ksp_max_it", 10000);
  cfg.restart = scope.get_int("ksp_gmres_restart", 30);
  require(cfg.rtol >= 0.0 && cfg.atol >= 0.0, "solver_from_options: negative tolerance");
  require(cfg.restart >= 1, "solver_from_options: restart must be >= 1");
  const std::string side =
      scope.get("ksp_pc_side", cfg.method == Method::fgmres ? "right" : "left");
  if (side == "left")
    cfg.side = PcSide::left;
  else if (side == "right")
    cfg.side = PcSide::right;
  else
    throw ConfigError(scope.full_key("ksp_pc_side"),
                      "option " + scope.full_key("ksp_pc_side") + ": expected left|right");
  if (cfg.method == Method::fgmres && cfg.side == PcSide::left)
    throw ConfigError(scope.full_key("ksp_pc_side"), "fgmres is right-preconditioned only");
  if (cfg.method == Method::cg && cfg.side == PcSide::right)
    throw ConfigError(scope.full_key("ksp_pc_side"), "cg supports left preconditioning only");
  cfg.monitor = scope.get_flag("ksp_monitor", false);
  cfg.label = scope.prefix().empty() ? "ksp" : scope.prefix();
  PcPtr pc = factory(scope, input);
  return Solver(std::move(A), std::move(cfg), std::move(pc));
}

}  // namespace pctk
