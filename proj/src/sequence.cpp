#include "seqkrylov/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "seqkrylov/lanczos.hpp"
#include "seqkrylov/matrix_market.hpp"
#include "seqkrylov/precond.hpp"
#include "seqkrylov/recycling.hpp"
#include "seqkrylov/rng.hpp"

namespace seqkrylov {

namespace {

std::vector<double> draw_spectrum(const SequenceConfig& cfg, Rng& rng) {
  const Index n = cfg.n;
  std::vector<double> lambda(n);
  switch (cfg.spectrum) {
    case SpectrumKind::Spd:
      for (Index i = 0; i < n; ++i) lambda[i] = rng.uniform(0.5, 2.0);
      break;
    case SpectrumKind::Ill: {
      if (!(cfg.kappa >= 1.0))
        throw std::invalid_argument("generate_sequence: kappa must be >= 1");
      // Log-spaced with exact endpoints, so the ratio is kappa exactly.
      for (Index i = 0; i < n; ++i)
        lambda[i] =
            n == 1 ? 1.0
                   : std::pow(cfg.kappa, static_cast<double>(i) /
                                             static_cast<double>(n - 1));
      break;
    }
    case SpectrumKind::Indefinite: {
      // Well-separated bulk of both signs plus a handful of small-magnitude
      // eigenvalues: the interior modes that slow a residual-minimizing
      // solver and that subspace recycling is able to deflate.
      const Index n_small = std::min<Index>(6, n / 8);
      for (Index i = 0; i < n; ++i) {
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        lambda[i] = sign * rng.uniform(0.5, 2.0);
      }
      if (n >= 2) {
        lambda[0] = 1.0;  // pin one of each sign in the bulk
        lambda[1] = -1.0;
      }
      for (Index i = 0; i < n_small; ++i) {
        const double mag =
            0.02 * std::pow(3.0, rng.uniform());  // in [0.02, 0.06]
        lambda[2 + i] = (i % 2 == 0 ? 1.0 : -1.0) * mag;
      }
      break;
    }
  }
  return lambda;
}

}  // namespace

double generated_cond(const SequenceConfig& cfg) {
  Rng rng(cfg.seed);
  const std::vector<double> lambda = draw_spectrum(cfg, rng);
  double lo = std::abs(lambda[0]), hi = 0.0;
  for (double l : lambda) {
    lo = std::min(lo, std::abs(l));
    hi = std::max(hi, std::abs(l));
  }
  return hi / lo;
}

SystemSequence generate_sequence(const SequenceConfig& cfg) {
  if (cfg.n < 2 || cfg.m < 1 || cfg.drift < 0.0)
    throw std::invalid_argument(
        "generate_sequence: need n >= 2, m >= 1, drift >= 0");
  // The rotation construction goes through a dense scratch matrix.
  if (cfg.n > 20000)
    throw std::invalid_argument(
        "generate_sequence: n > 20000 exceeds the dense construction scratch");
  const Index n = cfg.n;
  Rng rng(cfg.seed);

  const std::vector<double> lambda = draw_spectrum(cfg, rng);
  Matrix dense = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) dense(i, i) = lambda[i];

  // Rounds of disjoint adjacent-plane rotations: the spectrum is untouched
  // and the result stays banded, so the matrix is genuinely sparse.
  for (int round = 0; round < 3; ++round) {
    for (Index i = round % 2; i + 1 < n; i += 2) {
      const double theta = rng.uniform(0.0, 2.0 * M_PI);
      const double c = std::cos(theta);
      const double s = std::sin(theta);
      for (Index j = 0; j < n; ++j) {
        const double a = dense(i, j), b = dense(i + 1, j);
        dense(i, j) = c * a + s * b;
        dense(i + 1, j) = -s * a + c * b;
      }
      for (Index j = 0; j < n; ++j) {
        const double a = dense(j, i), b = dense(j, i + 1);
        dense(j, i) = c * a + s * b;
        dense(j, i + 1) = -s * a + c * b;
      }
    }
  }
  // Exact mirror so the symmetric flag validates bit-for-bit.
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 1; i < n; ++i) dense(i, j) = dense(j, i);

  SystemSequence seq;
  seq.n = n;
  seq.provenance = "synthetic seed=" + std::to_string(cfg.seed);
  seq.mats.push_back(SparseMatrix::from_dense(dense, 0.0, true));
  seq.rhs.push_back(rng.unit_vector(n));

  for (Index k = 1; k < cfg.m; ++k) {
    if (cfg.drift == 0.0) {
      seq.mats.push_back(seq.mats.back());
      seq.rhs.push_back(rng.unit_vector(n));
      continue;
    }
    // Random sparse symmetric perturbation of unit Frobenius norm.
    const Index pairs = std::max<Index>(2, n / 10);
    std::vector<Triplet> tr;
    for (Index p = 0; p < pairs; ++p) {
      const Index i = static_cast<Index>(rng.below(n));
      const Index j = static_cast<Index>(rng.below(n));
      const double v = rng.normal();
      tr.push_back({i, j, v});
      if (i != j) tr.push_back({j, i, v});
    }
    SparseMatrix e = SparseMatrix::from_triplets(n, n, tr, true);
    double fro = 0.0;
    for (double v : e.values()) fro += v * v;
    fro = std::sqrt(fro);
    seq.mats.push_back(add_scaled(seq.mats.back(), e, cfg.drift / fro));
    seq.rhs.push_back(rng.unit_vector(n));
  }
  return seq;
}

SystemSequence load_sequence(const std::vector<std::string>& paths) {
  if (paths.empty())
    throw std::invalid_argument("load_sequence: no input files");
  SystemSequence seq;
  seq.provenance = "files";
  for (const auto& path : paths) {
    SparseMatrix a = load_matrix_market(path);
    if (a.rows() != a.cols())
      throw std::invalid_argument(path + ": sequence matrices must be square");
    if (!a.symmetric()) {
      if (!a.check_symmetric(1e-12))
        throw std::invalid_argument(path + ": matrix is not symmetric");
      a.set_symmetric(true);
    }
    if (seq.mats.empty()) {
      seq.n = a.rows();
    } else if (a.rows() != seq.n) {
      throw std::invalid_argument(path + ": dimension differs from sequence");
    }
    seq.rhs.push_back(Vector::Ones(a.rows()));
    seq.mats.push_back(std::move(a));
  }
  return seq;
}

SequenceSummary run_comparison(const SystemSequence& seq,
                               const ComparisonOptions& opts) {
  if (seq.mats.empty())
    throw std::invalid_argument("run_comparison: empty sequence");
  const Index n = seq.n;
  const Index cond_iters =
      opts.cond_iters > 0 ? opts.cond_iters : std::min<Index>(n, 200);

  SequenceSummary summary;
  RecycleSpace carried;
  const Vector x0 = Vector::Zero(n);

  for (Index k = 0; k < seq.count(); ++k) {
    const SparseMatrix& a = seq.mats[k];
    const Vector& b = seq.rhs[k];
    const LinearOperator op = make_operator(a);

    ComparisonRecord rec;
    rec.k = k;

    SolveResult mres = minres_solve(op, b, x0, opts.solve);
    rec.minres_iters = mres.report.iterations;
    rec.minres_relres = mres.report.final_relres;
    rec.minres_converged = mres.report.converged;

    RminresResult rres =
        rminres_solve(op, b, x0, opts.solve, carried.empty() ? nullptr : &carried,
                      nullptr, opts.k_recycle, opts.record_deflation);
    rec.rminres_iters = rres.report.iterations;
    rec.rminres_relres = rres.report.final_relres;
    rec.rminres_converged = rres.report.converged;
    carried = std::move(rres.recycle);

    if (k > 0) rec.frob_diff_prev = frobenius_diff(a, seq.mats[k - 1]);
    try {
      rec.cond_est = opts.exact_cond ? cond_exact(a) : cond_estimate(a, cond_iters);
    } catch (const std::exception&) {
      rec.cond_est = std::nullopt;
    }

    summary.total_minres_iters += rec.minres_iters;
    summary.total_rminres_iters += rec.rminres_iters;
    if (!rec.minres_converged || !rec.rminres_converged) summary.partial = true;
    summary.records.push_back(rec);
  }
  summary.reduction_percent =
      summary.total_minres_iters > 0
          ? 100.0 * (1.0 - static_cast<double>(summary.total_rminres_iters) /
                               static_cast<double>(summary.total_minres_iters))
          : 0.0;
  return summary;
}

std::vector<std::vector<double>> run_comparison_deflation(
    const SystemSequence& seq, const ComparisonOptions& opts) {
  std::vector<std::vector<double>> histories;
  RecycleSpace carried;
  const Vector x0 = Vector::Zero(seq.n);
  for (Index k = 0; k < seq.count(); ++k) {
    const LinearOperator op = make_operator(seq.mats[k]);
    RminresResult rres = rminres_solve(
        op, seq.rhs[k], x0, opts.solve, carried.empty() ? nullptr : &carried,
        nullptr, opts.k_recycle, /*record_deflation=*/true);
    histories.push_back(std::move(rres.report.deflation_history));
    carried = std::move(rres.recycle);
  }
  return histories;
}

SamEvalReport run_sam_eval(const SystemSequence& seq,
                           const SamEvalOptions& opts) {
  if (seq.mats.empty())
    throw std::invalid_argument("run_sam_eval: empty sequence");
  const Index n = seq.n;
  SamEvalReport report;

  Preconditioner p0;
  bool have_seed = false;
  if (opts.seed_precond == SeedPrecond::Jacobi) {
    p0 = jacobi_precond(seq.mats.front());
    have_seed = true;
  } else if (opts.seed_precond == SeedPrecond::Ic0) {
    try {
      p0 = ic0(seq.mats.front());
      have_seed = true;
    } catch (const std::exception& e) {
      report.warning = std::string("ic0 seed failed (") + e.what() +
                       "); falling back to jacobi";
      p0 = jacobi_precond(seq.mats.front());
      have_seed = true;
    }
  }

  const Vector x0 = Vector::Zero(n);
  for (Index k = 0; k < seq.count(); ++k) {
    const SparseMatrix& a_k = seq.mats[k];
    const SparseMatrix& target =
        opts.target_previous && k > 0 ? seq.mats[k - 1] : seq.mats.front();

    SamEvalRecord rec;
    rec.k = k;
    const SparsityPattern pattern =
        build_pattern(a_k, opts.pattern, opts.tau);
    const SamMap map = compute_sam(a_k, target, pattern, opts.threads);
    rec.residual_fro = map.residual_fro;
    rec.map_nnz = map.n_map.nnz();

    if (have_seed) {
      // Paired right-preconditioned solves, compared on the true residual of
      // the original system (right preconditioning leaves it unchanged).
      // The composed map is generally nonsymmetric, so both arms run through
      // the conjugate-residual recurrence rather than MINRES.
      const Preconditioner pk = sam_precondition(map, p0);
      auto preconditioned = [&](const Preconditioner& p) {
        return LinearOperator{n, false, [&a_k, &p](const Vector& v) {
                                return matvec(a_k, p.apply_inverse(v));
                              }};
      };
      try {
        SolveResult seed_run =
            cr_solve(preconditioned(p0), seq.rhs[k], x0, opts.solve);
        rec.iters_seed = seed_run.report.iterations;
        rec.seed_converged = seed_run.report.converged;
      } catch (const SolverBreakdown&) {
        rec.seed_converged = false;
      }
      try {
        SolveResult sam_run =
            cr_solve(preconditioned(pk), seq.rhs[k], x0, opts.solve);
        rec.iters_sam = sam_run.report.iterations;
        rec.sam_converged = sam_run.report.converged;
      } catch (const SolverBreakdown&) {
        rec.sam_converged = false;
      }
    }
    report.records.push_back(rec);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string opt17(const std::optional<double>& v) {
  return v ? fmt17(*v) : std::string();
}

std::string json_opt(const std::optional<double>& v) {
  return v ? fmt17(*v) : std::string("null");
}

}  // namespace

void emit_csv(const SequenceSummary& summary, std::ostream& out) {
  out << "k,minres_iters,rminres_iters,frob_diff_prev,cond_est,minres_relres,"
         "rminres_relres\n";
  for (const auto& r : summary.records) {
    out << r.k << ',' << r.minres_iters << ',' << r.rminres_iters << ','
        << opt17(r.frob_diff_prev) << ',' << opt17(r.cond_est) << ','
        << fmt17(r.minres_relres) << ',' << fmt17(r.rminres_relres) << '\n';
  }
}

void emit_json(const SequenceSummary& summary, std::ostream& out) {
  out << "{\n";
  out << "  \"total_minres_iters\": " << summary.total_minres_iters << ",\n";
  out << "  \"total_rminres_iters\": " << summary.total_rminres_iters << ",\n";
  out << "  \"reduction_percent\": " << fmt17(summary.reduction_percent)
      << ",\n";
  out << "  \"partial\": " << (summary.partial ? "true" : "false") << ",\n";
  out << "  \"records\": [";
  for (std::size_t i = 0; i < summary.records.size(); ++i) {
    const auto& r = summary.records[i];
    out << (i == 0 ? "\n" : ",\n");
    out << "    {\"k\": " << r.k << ", \"minres_iters\": " << r.minres_iters
        << ", \"rminres_iters\": " << r.rminres_iters
        << ", \"frob_diff_prev\": " << json_opt(r.frob_diff_prev)
        << ", \"cond_est\": " << json_opt(r.cond_est)
        << ", \"minres_relres\": " << fmt17(r.minres_relres)
        << ", \"rminres_relres\": " << fmt17(r.rminres_relres)
        << ", \"minres_converged\": " << (r.minres_converged ? "true" : "false")
        << ", \"rminres_converged\": "
        << (r.rminres_converged ? "true" : "false") << "}";
  }
  out << "\n  ]\n}\n";
}

void emit_report(const SequenceSummary& summary, ReportFormat format,
                 const std::string& path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error(path + ": cannot open file for writing");
  if (format == ReportFormat::Csv)
    emit_csv(summary, out);
  else
    emit_json(summary, out);
  out.flush();
  if (!out) throw std::runtime_error(path + ": write failed");
}

SequenceSummary parse_summary_json(std::istream& in) {
  nlohmann::json j;
  in >> j;
  SequenceSummary s;
  s.total_minres_iters = j.at("total_minres_iters").get<long long>();
  s.total_rminres_iters = j.at("total_rminres_iters").get<long long>();
  s.reduction_percent = j.at("reduction_percent").get<double>();
  s.partial = j.at("partial").get<bool>();
  for (const auto& rj : j.at("records")) {
    ComparisonRecord r;
    r.k = rj.at("k").get<Index>();
    r.minres_iters = rj.at("minres_iters").get<Index>();
    r.rminres_iters = rj.at("rminres_iters").get<Index>();
    if (!rj.at("frob_diff_prev").is_null())
      r.frob_diff_prev = rj.at("frob_diff_prev").get<double>();
    if (!rj.at("cond_est").is_null())
      r.cond_est = rj.at("cond_est").get<double>();
    r.minres_relres = rj.at("minres_relres").get<double>();
    r.rminres_relres = rj.at("rminres_relres").get<double>();
    r.minres_converged = rj.at("minres_converged").get<bool>();
    r.rminres_converged = rj.at("rminres_converged").get<bool>();
    s.records.push_back(r);
  }
  return s;
}

void emit_sam_csv(const SamEvalReport& report, std::ostream& out) {
  out << "k,residual_fro,map_nnz,iters_seed,iters_sam\n";
  for (const auto& r : report.records) {
    out << r.k << ',' << fmt17(r.residual_fro) << ',' << r.map_nnz << ',';
    if (r.iters_seed) out << *r.iters_seed;
    out << ',';
    if (r.iters_sam) out << *r.iters_sam;
    out << '\n';
  }
}

void emit_sam_json(const SamEvalReport& report, std::ostream& out) {
  out << "{\n  \"warning\": \"" << report.warning << "\",\n  \"records\": [";
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    const auto& r = report.records[i];
    out << (i == 0 ? "\n" : ",\n");
    out << "    {\"k\": " << r.k
        << ", \"residual_fro\": " << fmt17(r.residual_fro)
        << ", \"map_nnz\": " << r.map_nnz << ", \"iters_seed\": "
        << (r.iters_seed ? std::to_string(*r.iters_seed) : "null")
        << ", \"iters_sam\": "
        << (r.iters_sam ? std::to_string(*r.iters_sam) : "null") << "}";
  }
  out << "\n  ]\n}\n";
}

}  // namespace seqkrylov
