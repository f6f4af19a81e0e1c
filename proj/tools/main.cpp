// Command-line front end: solve single systems, compare MINRES against
// RMINRES over a sequence, evaluate sparse approximate maps, and trace a
// Pareto front with the predictor-corrector loop.
//
// Exit codes: 0 success/convergence, 1 usage or input errors,
// 2 numerical nonconvergence.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "seqkrylov/lanczos.hpp"
#include "seqkrylov/matrix_market.hpp"
#include "seqkrylov/pareto.hpp"
#include "seqkrylov/precond.hpp"
#include "seqkrylov/recycling.hpp"
#include "seqkrylov/sequence.hpp"
#include "seqkrylov/solve.hpp"

namespace fs = std::filesystem;
using namespace seqkrylov;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNoConvergence = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string item = text.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw UsageError("--gen expects k=v pairs, got '" + item + "'");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return kv;
}

SequenceConfig gen_config(const std::string& text, std::uint64_t seed_flag) {
  SequenceConfig cfg;
  cfg.seed = seed_flag;
  for (const auto& [key, value] : parse_kv(text)) {
    try {
      if (key == "n")
        cfg.n = std::stoll(value);
      else if (key == "m")
        cfg.m = std::stoll(value);
      else if (key == "eps")
        cfg.drift = std::stod(value);
      else if (key == "seed")
        cfg.seed = std::stoull(value);
      else if (key == "kappa")
        cfg.kappa = std::stod(value);
      else if (key == "spectrum") {
        if (value == "indefinite")
          cfg.spectrum = SpectrumKind::Indefinite;
        else if (value == "spd")
          cfg.spectrum = SpectrumKind::Spd;
        else if (value == "ill")
          cfg.spectrum = SpectrumKind::Ill;
        else
          throw UsageError("unknown spectrum '" + value + "'");
      } else {
        throw UsageError("unknown generator key '" + key + "'");
      }
    } catch (const std::invalid_argument&) {
      throw UsageError("bad generator value for '" + key + "': " + value);
    }
  }
  return cfg;
}

std::vector<std::string> manifest_paths(const std::string& manifest) {
  std::vector<std::string> paths;
  if (fs::is_directory(manifest)) {
    for (const auto& entry : fs::directory_iterator(manifest))
      if (entry.path().extension() == ".mtx")
        paths.push_back(entry.path().string());
    std::sort(paths.begin(), paths.end());
  } else {
    std::ifstream in(manifest);
    if (!in) throw UsageError("cannot open manifest: " + manifest);
    const fs::path base = fs::path(manifest).parent_path();
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      fs::path p(line);
      paths.push_back(p.is_absolute() ? p.string() : (base / p).string());
    }
  }
  if (paths.empty()) throw UsageError("manifest resolves to no files");
  return paths;
}

SystemSequence resolve_sequence(const std::string& manifest,
                                const std::string& gen,
                                std::uint64_t seed_flag) {
  if (manifest.empty() == gen.empty())
    throw UsageError(
        "exactly one input source required: --manifest or --gen");
  if (!gen.empty()) return generate_sequence(gen_config(gen, seed_flag));
  return load_sequence(manifest_paths(manifest));
}

struct CommonFlags {
  double tol = 1e-8;
  long long max_iter = 0;
  long long recycle_dim = 10;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonFlags* f) {
  cmd->add_option("--tol", f->tol, "Relative residual tolerance");
  cmd->add_option("--max-iter", f->max_iter,
                  "Iteration cap (0 = system dimension)");
  cmd->add_option("--recycle-dim", f->recycle_dim,
                  "Recycle space dimension for rminres");
  cmd->add_option("--seed", f->seed, "Seed for all generated randomness");
  cmd->add_option("--out", f->out, "Report output path");
  cmd->add_option("--format", f->format, "Report format")
      ->check(CLI::IsMember({"csv", "json"}));
}

SolveOptions solve_options(const CommonFlags& f) {
  SolveOptions opts;
  opts.tol = f.tol;
  opts.max_iter = f.max_iter;
  opts.validate();
  return opts;
}

int cmd_solve(const std::string& matrix_path, const std::string& rhs_path,
              const std::string& solver, const std::string& precond,
              const CommonFlags& flags) {
  SparseMatrix a = load_matrix_market(matrix_path);
  if (a.rows() != a.cols()) throw UsageError("matrix must be square");
  if (!a.symmetric()) {
    if (!a.check_symmetric(1e-12))
      throw UsageError("matrix is not symmetric; the solvers require it");
    a.set_symmetric(true);
  }
  const Vector b =
      rhs_path.empty() ? Vector(Vector::Ones(a.rows())) : load_vector(rhs_path);
  if (b.size() != a.rows()) throw UsageError("rhs length does not match");

  Preconditioner m;
  const Preconditioner* mp = nullptr;
  if (precond == "jacobi") {
    m = jacobi_precond(a);
    mp = &m;
  } else if (precond == "ic0") {
    m = ic0(a);
    mp = &m;
  } else if (precond == "sam") {
    throw UsageError(
        "--precond sam needs a sequence context; use the sam subcommand");
  }

  const SolveOptions opts = solve_options(flags);
  const LinearOperator op = make_operator(a);
  const Vector x0 = Vector::Zero(a.rows());

  SolveReport report;
  if (solver == "cr") {
    if (mp != nullptr)
      throw UsageError("cr does not take a preconditioner");
    report = cr_solve(op, b, x0, opts).report;
  } else if (solver == "rminres") {
    report = rminres_solve(op, b, x0, opts, nullptr, mp,
                           static_cast<Index>(flags.recycle_dim))
                 .report;
  } else {
    report = minres_solve(op, b, x0, opts, mp).report;
  }

  std::cout << "solver=" << solver << " n=" << a.rows()
            << " iterations=" << report.iterations
            << " relres=" << fmt17(report.final_relres)
            << " converged=" << (report.converged ? "true" : "false") << "\n";

  if (!flags.out.empty()) {
    std::ofstream f(flags.out);
    if (!f) throw std::runtime_error(flags.out + ": cannot open for writing");
    if (flags.format == "json") {
      f << "{\n  \"iterations\": " << report.iterations
        << ",\n  \"converged\": " << (report.converged ? "true" : "false")
        << ",\n  \"final_relres\": " << fmt17(report.final_relres)
        << ",\n  \"relres_history\": [";
      for (std::size_t i = 0; i < report.relres_history.size(); ++i)
        f << (i ? ", " : "") << fmt17(report.relres_history[i]);
      f << "]\n}\n";
    } else {
      f << "iter,relres\n";
      for (std::size_t i = 0; i < report.relres_history.size(); ++i)
        f << i << ',' << fmt17(report.relres_history[i]) << '\n';
    }
  }
  return report.converged ? kExitOk : kExitNoConvergence;
}

int cmd_compare(const std::string& manifest, const std::string& gen,
                bool exact_cond, const CommonFlags& flags) {
  const SystemSequence seq = resolve_sequence(manifest, gen, flags.seed);
  ComparisonOptions opts;
  opts.solve = solve_options(flags);
  opts.k_recycle = static_cast<Index>(flags.recycle_dim);
  opts.exact_cond = exact_cond;
  const SequenceSummary summary = run_comparison(seq, opts);

  std::cout << "systems=" << summary.records.size()
            << " minres_total=" << summary.total_minres_iters
            << " rminres_total=" << summary.total_rminres_iters
            << " reduction_percent=" << fmt17(summary.reduction_percent)
            << (summary.partial ? " partial=true" : "") << "\n";
  if (!flags.out.empty())
    emit_report(summary,
                flags.format == "json" ? ReportFormat::Json : ReportFormat::Csv,
                flags.out);
  return summary.partial ? kExitNoConvergence : kExitOk;
}

int cmd_sam(const std::string& manifest, const std::string& gen,
            const std::string& pattern, double tau, const std::string& precond,
            const std::string& target, const CommonFlags& flags) {
  const SystemSequence seq = resolve_sequence(manifest, gen, flags.seed);
  SamEvalOptions opts;
  opts.solve = solve_options(flags);
  opts.tau = tau;
  opts.target_previous = target == "previous";
  if (pattern == "a")
    opts.pattern = PatternStrategy::PatternOfA;
  else if (pattern == "diag")
    opts.pattern = PatternStrategy::Diagonal;
  else
    opts.pattern = PatternStrategy::Threshold;
  if (precond == "jacobi")
    opts.seed_precond = SeedPrecond::Jacobi;
  else if (precond == "ic0")
    opts.seed_precond = SeedPrecond::Ic0;
  else if (precond == "sam")
    throw UsageError(
        "--precond names the seed P0 here; choose none, jacobi, or ic0");

  const SamEvalReport report = run_sam_eval(seq, opts);
  if (!report.warning.empty()) std::cerr << "warning: " << report.warning << "\n";
  double max_res = 0.0;
  for (const auto& r : report.records)
    max_res = std::max(max_res, r.residual_fro);
  std::cout << "systems=" << report.records.size()
            << " max_residual_fro=" << fmt17(max_res) << "\n";
  for (const auto& r : report.records) {
    std::cout << "k=" << r.k << " residual_fro=" << fmt17(r.residual_fro)
              << " nnz=" << r.map_nnz;
    if (r.iters_seed) std::cout << " iters_seed=" << *r.iters_seed;
    if (r.iters_sam) std::cout << " iters_sam=" << *r.iters_sam;
    std::cout << "\n";
  }
  if (!flags.out.empty()) {
    std::ofstream f(flags.out);
    if (!f) throw std::runtime_error(flags.out + ": cannot open for writing");
    if (flags.format == "json")
      emit_sam_json(report, f);
    else
      emit_sam_csv(report, f);
  }
  return kExitOk;
}

int cmd_pareto(const std::string& model_name, long long steps, double h,
               const std::string& solver, long long dim,
               const CommonFlags& flags) {
  const ObjectiveModel model =
      model_name == "quartic" ? make_quartic_model(dim, flags.seed)
                              : make_biquad_model(dim, flags.seed);
  Vector w0(2);
  w0 << 1.0, 0.0;
  const ParetoPoint start =
      corrector_step(model, Vector::Zero(dim), w0, flags.tol, 1000);

  TraceOptions opts;
  opts.steps = steps;
  opts.h = h;
  opts.solver = solver == "rminres" ? PredictorSolver::Rminres
                                    : PredictorSolver::Minres;
  opts.k_recycle = static_cast<Index>(flags.recycle_dim);
  opts.predictor = solve_options(flags);
  opts.corrector_tol = flags.tol;

  const FrontTrace trace = trace_front(model, start, opts);
  std::cout << "model=" << model.name << " points=" << trace.points.size()
            << " predictor_total_iters=" << trace.total_predictor_iters
            << " completed=" << (trace.completed ? "true" : "false") << "\n";

  if (!flags.out.empty()) {
    std::ofstream f(flags.out);
    if (!f) throw std::runtime_error(flags.out + ": cannot open for writing");
    f << "k,w1,w2";
    for (long long d = 0; d < dim; ++d) f << ",x" << d;
    f << ",f1,f2,stationarity_norm,predictor_iters\n";
    for (std::size_t k = 0; k < trace.points.size(); ++k) {
      const ParetoPoint& p = trace.points[k];
      f << k << ',' << fmt17(p.w[0]) << ',' << fmt17(p.w[1]);
      for (long long d = 0; d < dim; ++d) f << ',' << fmt17(p.x[d]);
      f << ',' << fmt17(p.f[0]) << ',' << fmt17(p.f[1]) << ','
        << fmt17(p.stationarity_norm) << ','
        << (k == 0 ? 0 : trace.predictor_iters[k - 1]) << '\n';
    }
  }
  return trace.completed ? kExitOk : kExitNoConvergence;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Matrix-free solvers for sequences of symmetric linear systems: "
      "MINRES/CR, recycling MINRES, sparse approximate map preconditioner "
      "updates, and a predictor-corrector Pareto tracer"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Print help for all subcommands");

  // solve
  auto* solve = app.add_subcommand("solve", "Solve a single symmetric system");
  std::string matrix_path, rhs_path;
  std::string solver = "minres", solve_precond = "none";
  CommonFlags solve_flags;
  solve->add_option("--matrix", matrix_path, "Matrix Market file")->required();
  solve->add_option("--rhs", rhs_path, "Right-hand side (defaults to ones)");
  solve->add_option("--solver", solver, "Solver")
      ->check(CLI::IsMember({"minres", "cr", "rminres"}));
  solve->add_option("--precond", solve_precond, "Preconditioner")
      ->check(CLI::IsMember({"none", "jacobi", "ic0", "sam"}));
  add_common(solve, &solve_flags);

  // compare
  auto* compare = app.add_subcommand(
      "compare", "MINRES vs RMINRES over a sequence, with diagnostics");
  std::string cmp_manifest, cmp_gen;
  bool exact_cond = false;
  CommonFlags cmp_flags;
  compare->add_option("--manifest", cmp_manifest,
                      "Manifest file (one path per line) or directory of .mtx");
  compare->add_option("--gen", cmp_gen,
                      "Synthetic sequence, e.g. n=200,m=20,eps=1e-4,seed=1"
                      ",spectrum=indefinite");
  compare->add_flag("--exact-cond", exact_cond,
                    "Exact condition numbers (dense, n <= 500)");
  add_common(compare, &cmp_flags);

  // sam
  auto* sam = app.add_subcommand(
      "sam", "Sparse approximate map evaluation along a sequence");
  std::string sam_manifest, sam_gen, sam_pattern = "a", sam_precond = "none";
  std::string sam_target = "first";
  double tau = 0.1;
  CommonFlags sam_flags;
  sam->add_option("--manifest", sam_manifest, "Manifest file or directory");
  sam->add_option("--gen", sam_gen, "Synthetic sequence parameters");
  sam->add_option("--pattern", sam_pattern, "Sparsity pattern strategy")
      ->check(CLI::IsMember({"a", "diag", "threshold"}));
  sam->add_option("--tau", tau, "Threshold fraction in (0, 1]");
  sam->add_option("--precond", sam_precond, "Seed preconditioner P0")
      ->check(CLI::IsMember({"none", "jacobi", "ic0", "sam"}));
  sam->add_option("--target", sam_target, "Map target matrix")
      ->check(CLI::IsMember({"first", "previous"}));
  add_common(sam, &sam_flags);

  // pareto
  auto* pareto = app.add_subcommand(
      "pareto", "Trace a Pareto front with the predictor-corrector loop");
  std::string model_name = "biquad", pareto_solver = "minres";
  long long steps = 10, dim = 50;
  double step_size = 1.0;
  CommonFlags pareto_flags;
  pareto->add_option("--model", model_name, "Built-in objective model")
      ->check(CLI::IsMember({"biquad", "quartic"}));
  pareto->add_option("--steps", steps, "Predictor-corrector steps");
  pareto->add_option("--step-size", step_size, "Predictor step size h");
  pareto->add_option("--solver", pareto_solver, "Predictor solver")
      ->check(CLI::IsMember({"minres", "rminres"}));
  pareto->add_option("--dim", dim, "Model dimension");
  add_common(pareto, &pareto_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    if (!app.get_subcommands().empty()) return app.exit(e);
    // Top-level help lists every subcommand with its full flag set.
    std::cout << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (solve->parsed())
      return cmd_solve(matrix_path, rhs_path, solver, solve_precond,
                       solve_flags);
    if (compare->parsed())
      return cmd_compare(cmp_manifest, cmp_gen, exact_cond, cmp_flags);
    if (sam->parsed())
      return cmd_sam(sam_manifest, sam_gen, sam_pattern, tau, sam_precond,
                     sam_target, sam_flags);
    if (pareto->parsed())
      return cmd_pareto(model_name, steps, step_size, pareto_solver, dim,
                        pareto_flags);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
