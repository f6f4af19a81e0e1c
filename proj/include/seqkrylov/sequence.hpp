#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "seqkrylov/sam.hpp"
#include "seqkrylov/solve.hpp"
#include "seqkrylov/sparse.hpp"

namespace seqkrylov {

/// An ordered sequence of symmetric systems (A_k, b_k) sharing one dimension.
struct SystemSequence {
  std::vector<SparseMatrix> mats;
  std::vector<Vector> rhs;
  Index n = 0;
  std::string provenance;

  Index count() const { return static_cast<Index>(mats.size()); }
};

enum class SpectrumKind { Indefinite, Spd, Ill };

struct SequenceConfig {
  Index n = 200;
  Index m = 20;
  double drift = 1e-4;
  SpectrumKind spectrum = SpectrumKind::Indefinite;
  double kappa = 1e6;  // target ratio for SpectrumKind::Ill
  std::uint64_t seed = 1;
};

/// Synthetic surrogate sequence: A_0 = Q Lambda Q' realized sparsely through
/// rounds of disjoint plane rotations (so the spectrum is known exactly and
/// the matrix stays banded), then A_k = A_{k-1} + drift * E_k with E_k random
/// sparse symmetric of unit Frobenius norm. Right-hand sides are random unit
/// vectors. Deterministic for a fixed seed.
SystemSequence generate_sequence(const SequenceConfig& config);

/// Loads a sequence from Matrix Market files, in the given order. Right-hand
/// sides default to ones vectors.
SystemSequence load_sequence(const std::vector<std::string>& paths);

/// Exact extremal-eigenvalue ratio of the spectrum generate_sequence draws
/// for this configuration (before drift). Intended for validating the
/// estimator against a known answer.
double generated_cond(const SequenceConfig& config);

struct ComparisonRecord {
  Index k = 0;
  Index minres_iters = 0;
  Index rminres_iters = 0;
  std::optional<double> frob_diff_prev;  // absent for k = 0
  std::optional<double> cond_est;        // absent if the estimate failed
  double minres_relres = 0.0;
  double rminres_relres = 0.0;
  bool minres_converged = false;
  bool rminres_converged = false;
};

struct SequenceSummary {
  long long total_minres_iters = 0;
  long long total_rminres_iters = 0;
  double reduction_percent = 0.0;
  bool partial = false;  // some solve failed to converge
  std::vector<ComparisonRecord> records;
};

struct ComparisonOptions {
  SolveOptions solve;
  Index k_recycle = 10;
  Index cond_iters = 0;      // 0: min(n, 200)
  bool exact_cond = false;   // densify (n <= 500) instead of estimating
  bool record_deflation = false;
};

/// Solves every system with MINRES from x0 = 0 and independently with
/// RMINRES threading the recycle space from the previous system, recording
/// the norm-difference and condition-number diagnostics alongside.
SequenceSummary run_comparison(const SystemSequence& seq,
                               const ComparisonOptions& opts);

/// Per-iteration deflation norms of the RMINRES arm, for diagnostics:
/// result[k][i] = ||C' r_i|| / ||r_0|| during system k's solve.
std::vector<std::vector<double>> run_comparison_deflation(
    const SystemSequence& seq, const ComparisonOptions& opts);

enum class SeedPrecond { None, Jacobi, Ic0 };

struct SamEvalRecord {
  Index k = 0;
  double residual_fro = 0.0;
  Index map_nnz = 0;
  std::optional<Index> iters_seed;  // paired solve with the seed P0
  std::optional<Index> iters_sam;   // paired solve with P_k = N_k P0
  bool seed_converged = true;
  bool sam_converged = true;
};

struct SamEvalReport {
  std::vector<SamEvalRecord> records;
  std::string warning;  // e.g. ic0 fallback to jacobi
};

struct SamEvalOptions {
  PatternStrategy pattern = PatternStrategy::PatternOfA;
  double tau = 0.1;
  SeedPrecond seed_precond = SeedPrecond::None;
  bool target_previous = false;  // map A_k to A_{k-1} instead of A_0
  SolveOptions solve;
  int threads = 0;
};

SamEvalReport run_sam_eval(const SystemSequence& seq,
                           const SamEvalOptions& opts);

enum class ReportFormat { Csv, Json };

/// CSV columns, exactly: k, minres_iters, rminres_iters, frob_diff_prev,
/// cond_est, minres_relres, rminres_relres. Floats carry 17 significant
/// digits; absent optionals are empty fields (null in JSON).
void emit_report(const SequenceSummary& summary, ReportFormat format,
                 const std::string& path);
void emit_csv(const SequenceSummary& summary, std::ostream& out);
void emit_json(const SequenceSummary& summary, std::ostream& out);

/// Inverse of emit_json, for round-tripping reports.
SequenceSummary parse_summary_json(std::istream& in);

void emit_sam_csv(const SamEvalReport& report, std::ostream& out);
void emit_sam_json(const SamEvalReport& report, std::ostream& out);

}  // namespace seqkrylov
