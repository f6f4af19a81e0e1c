#pragma once

#include "seqkrylov/lanczos.hpp"
#include "seqkrylov/operators.hpp"
#include "seqkrylov/solve.hpp"
#include "seqkrylov/types.hpp"

namespace seqkrylov {

/// Recycled subspace: directions U (n x k) paired with C = A U where C has
/// orthonormal columns and U is rescaled so the pairing A U = C holds
/// exactly for the operator the space was built against. Immutable once
/// constructed; carrying U to the next system in a sequence requires
/// rebuilding (C is stale as soon as A changes).
class RecycleSpace {
 public:
  RecycleSpace() = default;

  /// Builds the space from raw directions: C comes from a QR of A * u_raw,
  /// U absorbs the triangular factor. Directions whose image falls below the
  /// rank tolerance are dropped, so k() may come out smaller than requested.
  RecycleSpace(const LinearOperator& a, const Matrix& u_raw,
               double rank_tol = 1e-12);

  Index k() const { return u_.cols(); }
  bool empty() const { return u_.cols() == 0; }
  Index dim() const { return u_.rows(); }
  const Matrix& u() const { return u_; }
  const Matrix& c() const { return c_; }

  /// ||A U - C||_F, recomputed with true operator applications.
  double pairing_error(const LinearOperator& a) const;
  double orthonormality_error() const;

 private:
  Matrix u_;
  Matrix c_;
};

struct ProjectionResult {
  Vector x;
  Vector r;
};

/// Orthogonalizes the initial residual against the recycle space:
/// x1 = x0 + U C'(b - A x0), r1 = b - A x1 (so C' r1 == 0 up to rounding).
/// An empty space returns (x0, b - A x0) unchanged.
ProjectionResult project_initial(const LinearOperator& a, const Vector& b,
                                 const Vector& x0, const RecycleSpace& r);

struct RminresResult {
  Vector x;
  SolveReport report;
  RecycleSpace recycle;
};

/// Recycling MINRES. The residual is minimized over
/// x1 + range(U) + K^k(deflated A, r1); every new Lanczos vector is
/// orthogonalized against C (and the retained Krylov basis whenever a
/// recycle space is in play). The returned space of dimension
/// min(k_out, available) comes from harmonic Ritz extraction over the
/// augmented search space. With no incoming space and k_out = 0 this is
/// iterate-for-iterate identical to minres_solve.
///
/// record_deflation additionally fills report.deflation_history with
/// ||C' r_k|| / ||r_0|| per iteration (costs one extra operator application
/// per iteration; intended for diagnostics).
RminresResult rminres_solve(const LinearOperator& a, const Vector& b,
                            const Vector& x0, const SolveOptions& opts,
                            const RecycleSpace* r_in, const Preconditioner* m,
                            Index k_out, bool record_deflation = false);

/// Harmonic Ritz extraction over span(basis u U_in): selects the k_out pairs
/// of smallest magnitude harmonic Ritz value and lifts them into a new
/// recycle space built against A. Numerically degenerate directions are
/// dropped, shrinking the returned dimension.
RecycleSpace ritz_extract(const Matrix& basis, const RecycleSpace* r_in,
                          Index k_out, const LinearOperator& a);

}  // namespace seqkrylov
