#include "seqkrylov/lanczos.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "seqkrylov/rng.hpp"

namespace seqkrylov {

Matrix LanczosState::tridiagonal(Index k) const {
  Matrix t = Matrix::Zero(k, k);
  for (Index i = 0; i < k; ++i) {
    t(i, i) = alpha[i];
    if (i + 1 < k) {
      t(i, i + 1) = beta[i];
      t(i + 1, i) = beta[i];
    }
  }
  return t;
}

LanczosState lanczos_init(const Vector& r0, const Preconditioner* m,
                          bool reorthogonalize) {
  LanczosState s;
  s.reorthogonalize = reorthogonalize;
  Vector z = m ? m->apply_inverse(r0) : r0;
  const double b2 = r0.dot(z);
  if (m && b2 < 0.0)
    throw std::runtime_error(
        "lanczos: preconditioner is not positive definite");
  s.beta0 = std::sqrt(std::max(b2, 0.0));
  if (s.beta0 == 0.0) {
    s.breakdown = true;
    s.v = Vector::Zero(r0.size());
    s.z = s.v;
    return s;
  }
  s.v = r0 / s.beta0;
  s.z = z / s.beta0;
  s.v_prev = Vector::Zero(r0.size());
  if (reorthogonalize) {
    s.basis.push_back(s.v);
    s.zbasis.push_back(s.z);
  }
  return s;
}

void lanczos_step(const LinearOperator& a, LanczosState& s,
                  const Preconditioner* m) {
  if (s.breakdown) return;
  const Index k = s.steps();
  Vector q = a(s.z);
  const double alpha = s.z.dot(q);
  q -= alpha * s.v;
  if (k > 0) q -= s.beta[k - 1] * s.v_prev;
  if (s.reorthogonalize) {
    // Projection in the working inner product uses the z-vectors.
    for (std::size_t i = 0; i < s.basis.size(); ++i)
      q -= s.zbasis[i].dot(q) * s.basis[i];
  }
  Vector znext = m ? m->apply_inverse(q) : q;
  const double b2 = q.dot(znext);
  if (m && b2 < 0.0)
    throw std::runtime_error(
        "lanczos: preconditioner is not positive definite");
  const double beta = std::sqrt(std::max(b2, 0.0));

  s.alpha.push_back(alpha);
  s.beta.push_back(beta);
  s.scale = std::max({s.scale, std::abs(alpha), beta});

  if (beta <= 1e-14 * s.scale) {
    s.breakdown = true;
    return;
  }
  s.v_prev = s.v;
  s.v = q / beta;
  s.z = m ? Vector(znext / beta) : s.v;
  if (s.reorthogonalize) {
    s.basis.push_back(s.v);
    s.zbasis.push_back(s.z);
  }
}

std::vector<double> lanczos_eigenvalues(const LanczosState& s) {
  const Index k = s.steps();
  if (k == 0) return {};
  Eigen::SelfAdjointEigenSolver<Matrix> es(s.tridiagonal(k));
  const Vector& ev = es.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

double cond_estimate(const LinearOperator& a, Index iters) {
  const Index n = a.dim;
  const Index steps = std::min<Index>(std::max<Index>(iters, 1), n);
  Rng rng(0x5eedc0deULL);
  LanczosState s = lanczos_init(rng.unit_vector(n), nullptr,
                                /*reorthogonalize=*/true);
  for (Index i = 0; i < steps && !s.breakdown; ++i) lanczos_step(a, s);
  const std::vector<double> eigs = lanczos_eigenvalues(s);
  if (eigs.empty()) throw std::runtime_error("cond_estimate: empty spectrum");
  double lo = std::abs(eigs.front()), hi = 0.0;
  for (double e : eigs) {
    lo = std::min(lo, std::abs(e));
    hi = std::max(hi, std::abs(e));
  }
  if (lo < 1e-14 * hi)
    throw std::runtime_error("cond_estimate: matrix is numerically singular");
  return hi / lo;
}

double cond_estimate(const SparseMatrix& a, Index iters) {
  return cond_estimate(make_operator(a), iters);
}

double cond_exact(const SparseMatrix& a) {
  if (a.rows() > 500)
    throw std::invalid_argument(
        "cond_exact: dense path limited to n <= 500, got n = " +
        std::to_string(a.rows()));
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.to_dense());
  const Vector& ev = es.eigenvalues();
  double lo = std::abs(ev[0]), hi = 0.0;
  for (Index i = 0; i < ev.size(); ++i) {
    lo = std::min(lo, std::abs(ev[i]));
    hi = std::max(hi, std::abs(ev[i]));
  }
  if (lo < 1e-14 * hi)
    throw std::runtime_error("cond_exact: matrix is numerically singular");
  return hi / lo;
}

}  // namespace seqkrylov
