/// \file report.hpp
/// \brief Structured run reports: problem identity, resolved options, the
/// solve report tree, timings. Serializes to JSON and round-trips.

#pragma once

#include <json.hpp>

#include "pctk/solver.hpp"

namespace pctk {

using nlohmann::json;

namespace detail {

inline json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

inline double double_or_nan(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

inline json stats_to_json(const SubSolveStats& s) {
  json j;
  j["label"] = s.label;
  j["applications"] = s.applications;
  j["iterations"] = s.iterations;
  j["children"] = json::array();
  for (const auto& c : s.children) j["children"].push_back(stats_to_json(c));
  return j;
}

inline SubSolveStats stats_from_json(const json& j) {
  SubSolveStats s;
  s.label = j.at("label").get<std::string>();
  s.applications = j.at("applications").get<long>();
  s.iterations = j.at("iterations").get<long>();
  for (const auto& c : j.at("children")) s.children.push_back(stats_from_json(c));
  return s;
}

}  // namespace detail

inline json solve_report_to_json(const SolveReport& r) {
  json j;
  j["converged"] = to_string(r.reason);
  j["success"] = r.success;
  j["iterations"] = r.iterations;
  j["norm"] = r.norm;
  j["residual_history"] = r.residual_history;
  j["true_residual"] = detail::finite_or_null(r.true_residual_rel);
  j["sub_solves"] = json::array();
  for (const auto& s : r.sub_reports) j["sub_solves"].push_back(detail::stats_to_json(s));
  return j;
}

inline SolveReport solve_report_from_json(const json& j) {
  SolveReport r;
  r.reason = stop_reason_from_string(j.at("converged").get<std::string>());
  r.success = j.at("success").get<bool>();
  r.iterations = j.at("iterations").get<index_t>();
  r.norm = j.at("norm").get<std::string>();
  r.residual_history = j.at("residual_history").get<std::vector<double>>();
  r.true_residual_rel = detail::double_or_nan(j.at("true_residual"));
  for (const auto& s : j.at("sub_solves")) r.sub_reports.push_back(detail::stats_from_json(s));
  return r;
}

/// One solve run: problem identity and parameters, resolved options
/// (sufficient to reproduce the run), solve outcome, wall times per phase.
struct RunReport {
  static constexpr int kSchemaVersion = 1;

  std::string problem;
  json params = json::object();
  index_t dofs = 0;
  std::vector<std::pair<std::string, std::string>> options;  // resolved key/value
  std::vector<std::string> unused_options;
  SolveReport solve;
  double setup_seconds = 0.0;
  double solve_seconds = 0.0;
  double true_residual = std::numeric_limits<double>::quiet_NaN();

  json to_json() const {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["problem"] = problem;
    j["params"] = params;
    j["dofs"] = dofs;
    j["options"] = json::array();
    for (const auto& [k, v] : options) j["options"].push_back({{"key", k}, {"value", v}});
    j["unused_options"] = unused_options;
    j["solve"] = solve_report_to_json(solve);
    j["timing"] = {{"setup_seconds", setup_seconds}, {"solve_seconds", solve_seconds}};
    j["true_residual"] = detail::finite_or_null(true_residual);
    return j;
  }

  static RunReport from_json(const json& j) {
    require(j.at("schema_version").get<int>() == kSchemaVersion,
            "run report: unsupported schema version");
    RunReport r;
    r.problem = j.at("problem").get<std::string>();
    r.params = j.at("params");
    r.dofs = j.at("dofs").get<index_t>();
    for (const auto& o : j.at("options"))
      r.options.push_back({o.at("key").get<std::string>(), o.at("value").get<std::string>()});
    r.unused_options = j.at("unused_options").get<std::vector<std::string>>();
    r.solve = solve_report_from_json(j.at("solve"));
    r.setup_seconds = j.at("timing").at("setup_seconds").get<double>();
    r.solve_seconds = j.at("timing").at("solve_seconds").get<double>();
    r.true_residual = detail::double_or_nan(j.at("true_residual"));
    return r;
  }
};

}  // namespace pctk
