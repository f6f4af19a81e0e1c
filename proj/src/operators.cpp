#include "seqkrylov/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace seqkrylov {

Vector LinearOperator::operator()(const Vector& x) const {
  if (x.size() != dim)
    throw std::invalid_argument(
        "LinearOperator: expected dimension " + std::to_string(dim) +
        ", got " + std::to_string(x.size()));
  return apply(x);
}

LinearOperator make_operator(const SparseMatrix& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("make_operator: matrix must be square");
  return LinearOperator{a.rows(), a.symmetric(),
                        [&a](const Vector& x) { return matvec(a, x); }};
}

Preconditioner identity_preconditioner(Index n) {
  return Preconditioner{n, [](const Vector& v) { return v; }, "identity"};
}

bool probe_linearity(const LinearOperator& op, int trials, Rng& rng,
                     double tol) {
  for (int t = 0; t < trials; ++t) {
    const Vector x = rng.normal_vector(op.dim);
    const Vector y = rng.normal_vector(op.dim);
    const double a = rng.uniform(-2.0, 2.0);
    const double b = rng.uniform(-2.0, 2.0);
    const Vector lhs = op(a * x + b * y);
    const Vector rhs = a * op(x) + b * op(y);
    const double scale = lhs.norm() + rhs.norm() + 1.0;
    if ((lhs - rhs).norm() > tol * scale) return false;
  }
  return true;
}

bool probe_symmetry(const LinearOperator& op, int trials, Rng& rng,
                    double tol) {
  for (int t = 0; t < trials; ++t) {
    const Vector x = rng.normal_vector(op.dim);
    const Vector y = rng.normal_vector(op.dim);
    const Vector ax = op(x);
    const Vector ay = op(y);
    const double scale = ax.norm() * y.norm() + x.norm() * ay.norm() + 1.0;
    if (std::abs(ax.dot(y) - x.dot(ay)) > tol * scale) return false;
  }
  return true;
}

bool probe_spd(const Preconditioner& m, int trials, Rng& rng, double tol) {
  for (int t = 0; t < trials; ++t) {
    const Vector x = rng.normal_vector(m.dim);
    const Vector y = rng.normal_vector(m.dim);
    const Vector mx = m.apply_inverse(x);
    const Vector my = m.apply_inverse(y);
    if (x.dot(mx) <= 0.0) return false;
    const double scale = mx.norm() * y.norm() + x.norm() * my.norm() + 1.0;
    if (std::abs(mx.dot(y) - x.dot(my)) > tol * scale) return false;
  }
  return true;
}

}  // namespace seqkrylov
