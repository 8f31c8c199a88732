/// \file pc_factory.hpp
/// \brief Options-driven preconditioner dispatch and solver assembly. The
/// options tree alone determines the full nested structure.
///
/// {prefix}pc_type selects among:
///   none | jacobi | bjacobi | ilu | icc | amg | lu | fieldsplit | pcd_vx | pcd_vy
/// with per-type keys:
///   bjacobi:    pc_bjacobi_block_size (default 1)
///   ilu/icc:    pc_factor_shift (default 0 = off)
///   amg:        pc_amg_theta, pc_amg_coarse_size, pc_amg_max_levels, pc_amg_omega
///   fieldsplit: pc_fieldsplit_type, pc_fieldsplit_<i>_fields,
///               pc_fieldsplit_schur_fact_type, pc_fieldsplit_schur_precondition
///   pcd_*:      pcd_sign, child scopes pcd_mp_, pcd_ap_

#pragma once

#include "pctk/amg.hpp"
#include "pctk/fieldsplit.hpp"
#include "pctk/ilu.hpp"
#include "pctk/pcd.hpp"

namespace pctk {

inline PcPtr pc_from_options(const OptionsScope& scope, const PcInput& in) {
  require(in.matrix != nullptr, "pc_from_options: no preconditioning matrix");
  const std::string type = scope.get("pc_type", "none");
  const CsrMatrix& A = *in.matrix;

  if (type == "none") return pc_none(A.nrows());
  if (type == "jacobi") return pc_jacobi(A);
  if (type == "bjacobi")
    return pc_bjacobi(A, scope.get_int("pc_bjacobi_block_size", 1));
  if (type == "ilu") return pc_ilu0(A, scope.get_real("pc_factor_shift", 0.0));
  if (type == "icc") return pc_ic0(A, scope.get_real("pc_factor_shift", 0.0));
  if (type == "amg") {
    AmgParams p;
    p.theta = scope.get_real("pc_amg_theta", p.theta);
    p.coarse_size = scope.get_int("pc_amg_coarse_size", p.coarse_size);
    p.max_levels = scope.get_int("pc_amg_max_levels", p.max_levels);
    p.omega = scope.get_real("pc_amg_omega", p.omega);
    p.cycle = scope.get_int("pc_amg_cycle", p.cycle);
    p.sweeps = scope.get_int("pc_amg_sweeps", p.sweeps);
    p.over_correction = scope.get_real("pc_amg_over_correction", p.over_correction);
    p.aggregation = scope.get("pc_amg_aggregation", p.aggregation);
    return pc_amg(A, p);
  }
  if (type == "lu") return pc_lu(A);
  if (type == "fieldsplit") {
    if (!in.split)
      throw ConfigError(scope.full_key("pc_type"),
                        "splittable matrix required: pc_type=fieldsplit needs field "
                        "layout metadata on the operator");
    const PcFactory recurse = [](const OptionsScope& s, const PcInput& i) {
      return pc_from_options(s, i);
    };
    return std::make_unique<FieldsplitPc>(in.split, scope, in.aux, recurse);
  }
  if (type == "pcd_vx" || type == "pcd_vy") {
    if (!in.aux.pcd)
      throw ConfigError(scope.full_key("pc_type"),
                        "pc_type=" + type + " requires PCD context matrices (Mp, Ap, Fp)");
    const PcFactory recurse = [](const OptionsScope& s, const PcInput& i) {
      return pc_from_options(s, i);
    };
    return std::make_unique<PcdPc>(
        in.aux.pcd, type == "pcd_vx" ? PcdVariant::vX : PcdVariant::vY, scope, recurse);
  }
  throw ConfigError(scope.full_key("pc_type"),
                    "option " + scope.full_key("pc_type") + ": unknown pc_type '" + type +
                        "' (none|jacobi|bjacobi|ilu|icc|amg|lu|fieldsplit|pcd_vx|pcd_vy)");
}

inline const PcFactory& default_pc_factory() {
  static const PcFactory f = [](const OptionsScope& s, const PcInput& i) {
    return pc_from_options(s, i);
  };
  return f;
}

/// Solver over an explicit operator, preconditioner built from the options.
inline Solver make_solver(const OptionsScope& scope, LinearOperator A, const PcInput& in) {
  return solver_from_options(scope, std::move(A), default_pc_factory(), in);
}

/// Solver whose operator is the preconditioning matrix itself.
inline Solver make_solver(const OptionsScope& scope, const PcInput& in) {
  require(in.matrix != nullptr, "make_solver: no matrix");
  return make_solver(scope, LinearOperator::from_csr(in.matrix), in);
}

}  // namespace pctk
