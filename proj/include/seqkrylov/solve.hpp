#pragma once

#include <stdexcept>
#include <vector>

#include "seqkrylov/operators.hpp"
#include "seqkrylov/types.hpp"

namespace seqkrylov {

struct SolveOptions {
  double tol = 1e-8;    // relative residual tolerance
  Index max_iter = 0;   // 0 means the system dimension
  bool record_history = true;
  bool reorthogonalize = false;  // full reorthogonalization of the basis

  void validate() const;
  Index resolve_max_iter(Index n) const { return max_iter > 0 ? max_iter : n; }
};

struct SolveReport {
  Index iterations = 0;
  std::vector<double> relres_history;  // iterations + 1 entries when recorded
  bool converged = false;
  double final_relres = 0.0;
  /// ||C' r_k|| / ||r_0|| per iteration; filled only by the recycling solver
  /// when deflation recording is requested.
  std::vector<double> deflation_history;
};

struct SolveResult {
  Vector x;
  SolveReport report;
};

struct SolverBreakdown : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Called once per CR iteration with the recurrence scalars and iterates,
/// after the updates of that pass. beta is reported as 0 on a
/// degeneracy-recovery pass (where the literal recurrence has no beta).
using CrObserver = std::function<void(Index iter, double alpha, double beta,
                                      const Vector& x, const Vector& r)>;

/// Conjugate Residual method, the classic recurrence: r = b - Hx, p = r,
/// alpha_i = (Hr_i)'r_i / ||Hp_i||^2, then the x, r, beta, p updates. One
/// operator application per iteration.
SolveResult cr_solve(const LinearOperator& h, const Vector& b,
                     const Vector& x0, const SolveOptions& opts,
                     const CrObserver& observer = nullptr);

/// MINRES: Lanczos tridiagonalization with plane rotations applied on the
/// fly; each iterate minimizes the residual 2-norm over x0 + K^k(A, r0)
/// (the M^{-1}-norm analogue when a preconditioner is given, which must act
/// as a symmetric positive definite operator).
SolveResult minres_solve(const LinearOperator& a, const Vector& b,
                         const Vector& x0, const SolveOptions& opts,
                         const Preconditioner* m = nullptr);

}  // namespace seqkrylov
