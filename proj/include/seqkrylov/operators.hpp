#pragma once

#include <functional>
#include <string>

#include "seqkrylov/rng.hpp"
#include "seqkrylov/sparse.hpp"
#include "seqkrylov/types.hpp"

namespace seqkrylov {

/// Matrix-free linear operator: all the solvers need is the action on a
/// vector. `symmetric` is an assertion by the constructor, spot-checkable
/// with probe_symmetry.
struct LinearOperator {
  Index dim = 0;
  bool symmetric = false;
  std::function<Vector(const Vector&)> apply;

  Vector operator()(const Vector& x) const;
};

/// Wraps a sparse matrix as an operator. The matrix is captured by reference
/// and must outlive the operator.
LinearOperator make_operator(const SparseMatrix& a);

struct Preconditioner {
  Index dim = 0;
  std::function<Vector(const Vector&)> apply_inverse;
  std::string description;
};

Preconditioner identity_preconditioner(Index n);

/// apply(ax + by) == a*apply(x) + b*apply(y) on random triples, relative
/// tolerance `tol`.
bool probe_linearity(const LinearOperator& op, int trials, Rng& rng,
                     double tol = 1e-10);

/// <apply(x), y> == <x, apply(y)> on random pairs.
bool probe_symmetry(const LinearOperator& op, int trials, Rng& rng,
                    double tol = 1e-10);

/// Checks that M behaves as a symmetric positive definite preconditioner on
/// random probe vectors: r'M^{-1}r > 0 and <M^{-1}x, y> == <x, M^{-1}y>.
bool probe_spd(const Preconditioner& m, int trials, Rng& rng,
               double tol = 1e-8);

}  // namespace seqkrylov
