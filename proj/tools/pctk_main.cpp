// pctk command-line driver: generate problems, compose solvers from the
// options database, run solves, emit structured reports.
//
// Subcommands: solve | sweep | dump | info. Option tokens after a literal
// "--" go to the options database verbatim ("-key value" grammar), merged
// over any --options-file contents (command line wins).
//
// Exit codes: 0 converged, 1 configuration/usage error, 2 non-convergence.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pctk/pctk.hpp"

namespace {

using namespace pctk;
using nlohmann::json;

struct CommonArgs {
  std::string problem;
  std::string n_spec = "8";
  std::uint64_t seed = 1;
  double viscosity = 0.1;
  std::vector<std::string> options_files;
  std::string report_path;
  std::string csv_path;
  std::string outdir = "out";
  bool strict_options = false;
  std::string matrix_path, layout_path, rhs_path;
  std::string schur_path, pcd_mp_path, pcd_ap_path, pcd_fp_path;
};

struct BuiltSystem {
  std::shared_ptr<const SplittableMatrix> K;
  DenseVector b;
  AuxOperators aux;
  json params = json::object();
};

std::vector<index_t> parse_n_list(const std::string& spec) {
  std::vector<index_t> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(static_cast<index_t>(std::stol(item)));
  }
  require(!out.empty(), "empty --n grid");
  return out;
}

BuiltSystem build_system(const CommonArgs& args, index_t n) {
  BuiltSystem built;
  if (args.problem == "mixed-poisson") {
    auto sys = gen_mixed_poisson(n, args.seed);
    built.K = std::make_shared<const SplittableMatrix>(std::move(sys.K));
    built.b = std::move(sys.b);
    built.aux.user_schur = std::make_shared<const CsrMatrix>(std::move(sys.S_dg));
    built.params = {{"n", n}, {"seed", args.seed}};
  } else if (args.problem == "oseen-cavity") {
    auto sys = gen_oseen_cavity(n, args.viscosity, args.seed);
    built.K = std::make_shared<const SplittableMatrix>(std::move(sys.K));
    built.b = std::move(sys.b);
    built.aux.pcd = std::make_shared<const PcdContext>(std::move(sys.pcd));
    built.params = {{"n", n}, {"viscosity", args.viscosity}, {"seed", args.seed}};
  } else if (args.problem == "algebraic-demo") {
    auto sys = gen_algebraic_demo();
    built.K = std::make_shared<const SplittableMatrix>(std::move(sys.K));
    built.b = std::move(sys.b);
    built.params = json::object();
  } else if (args.problem == "from-files") {
    require(!args.matrix_path.empty() && !args.layout_path.empty() && !args.rhs_path.empty(),
            "--problem from-files requires --matrix, --layout and --rhs");
    auto sys = load_system(args.matrix_path, args.layout_path, args.rhs_path);
    built.K = std::make_shared<const SplittableMatrix>(std::move(sys.K));
    built.b = std::move(sys.b);
    built.params = {{"matrix", args.matrix_path},
                    {"layout", args.layout_path},
                    {"rhs", args.rhs_path}};
  } else {
    throw ConfigError("problem", "unknown problem '" + args.problem +
                                     "' (mixed-poisson|oseen-cavity|algebraic-demo|from-files)");
  }
  if (!args.schur_path.empty())
    built.aux.user_schur = std::make_shared<const CsrMatrix>(read_matrix_market(args.schur_path));
  if (!args.pcd_mp_path.empty() || !args.pcd_ap_path.empty() || !args.pcd_fp_path.empty()) {
    require(!args.pcd_mp_path.empty() && !args.pcd_ap_path.empty() && !args.pcd_fp_path.empty(),
            "PCD context requires all of --pcd-mp, --pcd-ap, --pcd-fp");
    PcdContext ctx;
    ctx.Mp = read_matrix_market(args.pcd_mp_path);
    ctx.Ap = read_matrix_market(args.pcd_ap_path);
    ctx.Fp = read_matrix_market(args.pcd_fp_path);
    built.aux.pcd = std::make_shared<const PcdContext>(std::move(ctx));
  }
  return built;
}

OptionsDb merge_options(const CommonArgs& args, const std::vector<std::string>& raw_tokens) {
  OptionsDb db;
  for (const std::string& path : args.options_files) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "cannot open options file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    parse_file_into(db, ss.str());
  }
  parse_args_into(db, raw_tokens);  // command line wins
  return db;
}

void check_unused(const OptionsDb& db, bool strict) {
  const std::vector<std::string> unused = db.unused_keys();
  if (unused.empty()) return;
  std::string joined;
  for (const std::string& k : unused) joined += (joined.empty() ? "" : ", ") + k;
  if (strict)
    throw ConfigError(unused.front(),
                      "unused option(s) with --strict-options: " + joined);
  std::fprintf(stderr, "warning: unused option(s): %s\n", joined.c_str());
}

RunReport run_one(const CommonArgs& args, const BuiltSystem& built, const OptionsDb& db) {
  OptionsScope scope(db);
  const auto t0 = std::chrono::steady_clock::now();
  Solver solver = make_solver(scope, make_pc_input(built.K, built.aux));
  const auto t1 = std::chrono::steady_clock::now();
  check_unused(db, args.strict_options);
  DenseVector x;
  SolveReport rep = solver.solve(built.b, x);
  const auto t2 = std::chrono::steady_clock::now();

  RunReport run;
  run.problem = args.problem;
  run.params = built.params;
  run.dofs = built.K->matrix.nrows();
  run.options = db.resolved();
  run.unused_options = db.unused_keys();
  run.solve = std::move(rep);
  run.setup_seconds = std::chrono::duration<double>(t1 - t0).count();
  run.solve_seconds = std::chrono::duration<double>(t2 - t1).count();
  // true residual recomputed from the assembled operator
  DenseVector ax = spmv(built.K->matrix, x);
  double rn = 0.0, bn = 0.0;
  for (std::size_t i = 0; i < built.b.size(); ++i) {
    const double d = built.b[i] - ax[i];
    rn += d * d;
    bn += built.b[i] * built.b[i];
  }
  run.true_residual = bn > 0.0 ? std::sqrt(rn / bn) : std::sqrt(rn);
  return run;
}

void write_report_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open for writing: " + path);
  out << j.dump(2) << "\n";
  require(out.good(), "write failed: " + path);
}

int cmd_solve(const CommonArgs& args, const std::vector<std::string>& raw_tokens) {
  const std::vector<index_t> grid = parse_n_list(args.n_spec);
  require(grid.size() == 1, "solve takes a single --n (use sweep for grids)");
  const OptionsDb db = merge_options(args, raw_tokens);
  const BuiltSystem built = build_system(args, grid.front());
  const RunReport run = run_one(args, built, db);

  std::cout << "problem:  " << args.problem;
  for (auto it = run.params.begin(); it != run.params.end(); ++it)
    std::cout << " " << it.key() << "=" << it.value().dump();
  std::cout << "\ndofs:     " << run.dofs << "\n";
  std::cout << "solver:   converged=" << to_string(run.solve.reason)
            << " iterations=" << run.solve.iterations << " (" << run.solve.norm
            << " norm)\n";
  std::cout << detail::strfmt("residual: true relative %.6e\n", run.true_residual);
  std::cout << detail::strfmt("time:     setup %.3fs solve %.3fs\n", run.setup_seconds,
                              run.solve_seconds);
  if (!args.report_path.empty()) write_report_file(args.report_path, run.to_json());
  return run.solve.success ? 0 : 2;
}

int cmd_sweep(const CommonArgs& args, const std::vector<std::string>& raw_tokens) {
  const std::vector<index_t> grid = parse_n_list(args.n_spec);
  json rows = json::array();
  std::string csv = "n,dofs,iterations,converged,success,true_residual,setup_seconds,solve_seconds\n";
  bool all_ok = true;
  std::printf("%8s %10s %10s %10s %14s %10s\n", "n", "dofs", "iters", "reason",
              "true_res", "solve_s");
  for (index_t n : grid) {
    const OptionsDb db = merge_options(args, raw_tokens);
    RunReport run;
    bool ok = false;
    try {
      const BuiltSystem built = build_system(args, n);
      run = run_one(args, built, db);
      ok = run.solve.success;
    } catch (const ConfigError&) {
      throw;  // configuration problems abort the sweep
    } catch (const Error& e) {
      std::fprintf(stderr, "sweep n=%d failed: %s\n", n, e.what());
      run.problem = args.problem;
      run.params = {{"n", n}, {"error", e.what()}};
    }
    all_ok = all_ok && ok;
    rows.push_back(run.to_json());
    csv += detail::strfmt("%d,%d,%d,%s,%s,%.17g,%.6f,%.6f\n", n, run.dofs,
                          run.solve.iterations, to_string(run.solve.reason),
                          ok ? "true" : "false", run.true_residual, run.setup_seconds,
                          run.solve_seconds);
    std::printf("%8d %10d %10d %10s %14.4e %10.3f\n", n, run.dofs, run.solve.iterations,
                to_string(run.solve.reason), run.true_residual, run.solve_seconds);
  }
  if (!args.csv_path.empty()) {
    std::ofstream out(args.csv_path, std::ios::binary);
    require(out.good(), "cannot open for writing: " + args.csv_path);
    out << csv;
  }
  if (!args.report_path.empty())
    write_report_file(args.report_path, json{{"schema_version", RunReport::kSchemaVersion},
                                             {"sweep", rows}});
  return all_ok ? 0 : 2;
}

int cmd_dump(const CommonArgs& args) {
  const std::vector<index_t> grid = parse_n_list(args.n_spec);
  require(grid.size() == 1, "dump takes a single --n");
  const index_t n = grid.front();
  std::vector<std::string> written = {args.outdir + "/K.mtx", args.outdir + "/K.layout.json",
                                      args.outdir + "/b.mtx"};
  if (args.problem == "mixed-poisson") {
    auto sys = gen_mixed_poisson(n, args.seed);
    dump_system(args.outdir, sys.K, sys.b, {{"S_dg", &sys.S_dg}});
    written.push_back(args.outdir + "/S_dg.mtx");
  } else if (args.problem == "oseen-cavity") {
    auto sys = gen_oseen_cavity(n, args.viscosity, args.seed);
    dump_system(args.outdir, sys.K, sys.b,
                {{"pcd_Mp", &sys.pcd.Mp}, {"pcd_Ap", &sys.pcd.Ap}, {"pcd_Fp", &sys.pcd.Fp}});
    written.push_back(args.outdir + "/pcd_Mp.mtx");
    written.push_back(args.outdir + "/pcd_Ap.mtx");
    written.push_back(args.outdir + "/pcd_Fp.mtx");
  } else if (args.problem == "algebraic-demo") {
    auto sys = gen_algebraic_demo();
    dump_system(args.outdir, sys.K, sys.b);
  } else {
    throw ConfigError("problem", "dump supports generated problems only, got '" +
                                     args.problem + "'");
  }
  for (const std::string& f : written) std::cout << "wrote " << f << "\n";
  return 0;
}

int cmd_info(const CommonArgs& args) {
  require(!args.matrix_path.empty(), "info requires --matrix");
  const CsrMatrix A = read_matrix_market(args.matrix_path);
  std::cout << args.matrix_path << ": " << A.nrows() << " x " << A.ncols()
            << ", nnz " << A.nnz() << "\n";
  if (A.nrows() != A.ncols()) {
    std::cout << "WARNING: matrix is not square\n";
  } else {
    const CsrMatrix At = transpose(A);
    bool pattern_sym = At.row_offsets() == A.row_offsets() &&
                       At.col_indices() == A.col_indices();
    double max_diff = 0.0;
    if (pattern_sym)
      for (std::size_t k = 0; k < A.values().size(); ++k)
        max_diff = std::max(max_diff, std::fabs(A.values()[k] - At.values()[k]));
    if (pattern_sym)
      std::cout << detail::strfmt("symmetry: pattern symmetric, max |A - A^T| = %.3e\n",
                                  max_diff);
    else
      std::cout << "symmetry: pattern not symmetric\n";
  }
  if (!args.layout_path.empty()) {
    const BlockLayout layout = read_layout_json(args.layout_path);
    std::cout << args.layout_path << ": global_size " << layout.global_size() << ", fields";
    for (const FieldSpec& f : layout.fields())
      std::cout << " " << f.name << "(" << f.indices.size() << ")";
    std::cout << "\n";
    if (layout.global_size() != A.nrows())
      std::cout << "WARNING: layout global_size " << layout.global_size()
                << " does not match matrix rows " << A.nrows() << "\n";
  }
  if (!args.rhs_path.empty()) {
    const DenseVector b = read_vector(args.rhs_path);
    std::cout << args.rhs_path << ": length " << b.size() << "\n";
    if (static_cast<index_t>(b.size()) != A.nrows())
      std::cout << "WARNING: rhs length " << b.size() << " does not match matrix rows "
                << A.nrows() << "\n";
  }
  return 0;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_problem) {
  if (needs_problem)
    cmd->add_option("--problem", args.problem,
                    "mixed-poisson|oseen-cavity|algebraic-demo|from-files")
        ->required();
  cmd->add_option("--n", args.n_spec, "cells per side (sweep: comma-separated list)");
  cmd->add_option("--seed", args.seed, "RNG seed for generated data");
  cmd->add_option("--viscosity", args.viscosity, "oseen-cavity viscosity");
  cmd->add_option("--options-file", args.options_files,
                  "options file ('key: value' lines), repeatable");
  cmd->add_option("--report", args.report_path, "write a JSON run report here");
  cmd->add_option("--csv", args.csv_path, "write sweep rows as CSV here");
  cmd->add_option("--outdir", args.outdir, "output directory for dump");
  cmd->add_flag("--strict-options", args.strict_options,
                "fail on unused (misspelled) options");
  cmd->add_option("--matrix", args.matrix_path, "operator .mtx (from-files / info)");
  cmd->add_option("--layout", args.layout_path, "layout sidecar JSON");
  cmd->add_option("--rhs", args.rhs_path, "right-hand side .mtx or text");
  cmd->add_option("--schur-mat", args.schur_path, "user Schur preconditioning matrix .mtx");
  cmd->add_option("--pcd-mp", args.pcd_mp_path, "PCD pressure mass matrix .mtx");
  cmd->add_option("--pcd-ap", args.pcd_ap_path, "PCD pressure Laplacian .mtx");
  cmd->add_option("--pcd-fp", args.pcd_fp_path, "PCD convection-diffusion matrix .mtx");
}

}  // namespace

int main(int argc, char** argv) {
  // everything after a literal "--" is raw option tokens
  std::vector<std::string> cli_args;
  std::vector<std::string> raw_tokens;
  bool after_sep = false;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (!after_sep && a == "--") {
      after_sep = true;
      continue;
    }
    (after_sep ? raw_tokens : cli_args).push_back(a);
  }

  CLI::App app{"pctk: block preconditioning toolkit for sparse saddle-point systems"};
  app.require_subcommand(1);
  CommonArgs args;
  CLI::App* solve = app.add_subcommand("solve", "generate or load a system and solve it");
  add_common(solve, args, true);
  CLI::App* sweep = app.add_subcommand("sweep", "solve over a grid of n values");
  add_common(sweep, args, true);
  CLI::App* dump = app.add_subcommand("dump", "write a generated system to .mtx files");
  add_common(dump, args, true);
  CLI::App* info = app.add_subcommand("info", "inspect .mtx / layout files");
  add_common(info, args, false);

  try {
    app.parse(cli_args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (solve->parsed()) return cmd_solve(args, raw_tokens);
    if (sweep->parsed()) return cmd_sweep(args, raw_tokens);
    if (dump->parsed()) return cmd_dump(args);
    if (info->parsed()) return cmd_info(args);
  } catch (const pctk::ConfigError& e) {
    std::fprintf(stderr, "configuration error (%s): %s\n", e.key().c_str(), e.what());
    std::fprintf(stderr, "run with --help for usage\n");
    return 1;
  } catch (const pctk::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
