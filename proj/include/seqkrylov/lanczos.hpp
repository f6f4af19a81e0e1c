#pragma once

#include <vector>

#include "seqkrylov/operators.hpp"
#include "seqkrylov/sparse.hpp"
#include "seqkrylov/types.hpp"

namespace seqkrylov {

/// State of the (optionally preconditioned) Lanczos iteration. After k steps
/// alpha holds the k diagonal entries of T and beta[k-1] the norm of the
/// candidate next vector; T_k is tridiag(beta[0..k-2], alpha, beta[0..k-2]).
/// With a preconditioner M the vectors v_j are M^{-1}-orthonormal and
/// z_j = M^{-1} v_j; without one z_j == v_j.
struct LanczosState {
  std::vector<double> alpha;
  std::vector<double> beta;
  Vector v_prev;
  Vector v;
  Vector z;
  double beta0 = 0.0;  // norm of the starting residual in the working metric
  bool reorthogonalize = false;
  std::vector<Vector> basis;   // retained v_j when reorthogonalizing
  std::vector<Vector> zbasis;  // retained z_j (distinct only when M given)
  bool breakdown = false;
  double scale = 0.0;  // running max |T| entry, the breakdown reference

  Index steps() const { return static_cast<Index>(alpha.size()); }

  /// Dense symmetric tridiagonal T_k for the first k steps.
  Matrix tridiagonal(Index k) const;
};

/// Initializes the state from a (generally non-normalized) starting residual.
LanczosState lanczos_init(const Vector& r0, const Preconditioner* m = nullptr,
                          bool reorthogonalize = false);

/// Appends one (alpha, beta) pair. After a happy breakdown (beta below
/// 1e-14 * scale) the state is frozen and further calls are no-ops.
void lanczos_step(const LinearOperator& a, LanczosState& state,
                  const Preconditioner* m = nullptr);

/// Eigenvalues of the tridiagonal matrix accumulated so far, ascending.
std::vector<double> lanczos_eigenvalues(const LanczosState& state);

/// Condition-number estimate |lambda_max| / |lambda_min| from the extremal
/// eigenvalues of a Lanczos tridiagonalization of length min(iters, n).
/// Throws std::runtime_error ("numerically singular") when the estimated
/// smallest magnitude falls below 1e-14 of the largest.
double cond_estimate(const SparseMatrix& a, Index iters);
double cond_estimate(const LinearOperator& a, Index iters);

/// Exact ratio via dense eigendecomposition; limited to n <= 500.
double cond_exact(const SparseMatrix& a);

}  // namespace seqkrylov
