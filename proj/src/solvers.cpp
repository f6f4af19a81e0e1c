// Implements solve.hpp (CR, MINRES) and recycling.hpp (RMINRES). MINRES and
// RMINRES share one engine so that RMINRES with an empty recycle space and
// k_out = 0 reproduces MINRES iterate for iterate.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "seqkrylov/linalg.hpp"
#include "seqkrylov/recycling.hpp"
#include "seqkrylov/rng.hpp"
#include "seqkrylov/solve.hpp"

namespace seqkrylov {

void SolveOptions::validate() const {
  if (!(tol > 0.0 && tol < 1.0))
    throw std::invalid_argument("SolveOptions: tol must be in (0, 1)");
  if (max_iter < 0)
    throw std::invalid_argument("SolveOptions: max_iter must be >= 0");
}

namespace {

void check_system(const LinearOperator& a, const Vector& b, const Vector& x0,
                  const char* who) {
  if (b.size() != a.dim || x0.size() != a.dim)
    throw std::invalid_argument(std::string(who) +
                                ": dimension mismatch, operator dim " +
                                std::to_string(a.dim) + ", b has " +
                                std::to_string(b.size()) + ", x0 has " +
                                std::to_string(x0.size()));
}

}  // namespace

SolveResult cr_solve(const LinearOperator& h, const Vector& b,
                     const Vector& x0, const SolveOptions& opts,
                     const CrObserver& observer) {
  opts.validate();
  check_system(h, b, x0, "cr_solve");
  const Index n = h.dim;
  const Index max_iter = opts.resolve_max_iter(n);

  SolveResult out;
  out.x = Vector::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    // Zero right-hand side: the solution is x = 0.
    out.report.converged = true;
    out.report.final_relres = 0.0;
    if (opts.record_history) out.report.relres_history.push_back(0.0);
    return out;
  }

  Vector x = x0;
  Vector r = x0.isZero(0.0) ? b : Vector(b - h(x0));
  Vector hr = h(r);
  Vector p = r;
  Vector hp = hr;

  double relres = r.norm() / bnorm;
  if (opts.record_history) out.report.relres_history.push_back(relres);

  Index i = 0;
  while (i < max_iter && relres > opts.tol) {
    const double hp_norm2 = hp.squaredNorm();
    if (std::sqrt(hp_norm2) < 1e-30)
      throw SolverBreakdown("CR breakdown at iteration " + std::to_string(i) +
                            ": ||Hp|| vanished with nonconverged residual");
    const double s = hr.dot(r);
    if (std::abs(s) <= 1e-14 * hr.norm() * r.norm()) {
      // (Hr)'r = 0 stalls the recurrence (possible for indefinite H):
      // advance the direction by one operator power, take the true
      // residual-minimizing step along it, and restart the recurrence.
      p = hp;
      hp = h(p);
      const double denom = hp.squaredNorm();
      if (std::sqrt(denom) < 1e-30)
        throw SolverBreakdown("CR breakdown at iteration " +
                              std::to_string(i) + ": degenerate direction");
      const double alpha = r.dot(hp) / denom;
      x += alpha * p;
      r -= alpha * hp;
      hr = h(r);
      p = r;
      hp = hr;
      if (observer) observer(i, alpha, 0.0, x, r);
    } else {
      const double alpha = s / hp_norm2;
      x += alpha * p;
      r -= alpha * hp;
      const Vector hr_next = h(r);
      const double s_next = hr_next.dot(r);
      const double beta = s_next / s;
      p = r + beta * p;
      hp = hr_next + beta * hp;
      hr = hr_next;
      if (observer) observer(i, alpha, beta, x, r);
    }
    ++i;
    relres = r.norm() / bnorm;
    if (!std::isfinite(relres))
      throw SolverBreakdown("CR numerical breakdown at iteration " +
                            std::to_string(i));
    if (opts.record_history) out.report.relres_history.push_back(relres);
  }

  out.x = x;
  out.report.iterations = i;
  out.report.final_relres = (b - h(x)).norm() / bnorm;
  out.report.converged = out.report.final_relres <= opts.tol;
  return out;
}

// ---------------------------------------------------------------------------
// Recycle space
// ---------------------------------------------------------------------------

RecycleSpace::RecycleSpace(const LinearOperator& a, const Matrix& u_raw,
                           double rank_tol) {
  const Index n = a.dim;
  const Index k = u_raw.cols();
  if (k == 0) {
    u_ = Matrix(n, 0);
    c_ = Matrix(n, 0);
    return;
  }
  if (u_raw.rows() != n)
    throw std::invalid_argument("RecycleSpace: dimension mismatch");

  Matrix y(n, k);
  for (Index j = 0; j < k; ++j) y.col(j) = a(u_raw.col(j));

  QrResult qr = orthonormalize(y, rank_tol);
  const Index kk = qr.q.cols();
  if (kk == 0) {
    u_ = Matrix(n, 0);
    c_ = Matrix(n, 0);
    return;
  }

  // Keep the surviving directions and absorb R into U so that A U = C holds
  // in the stored pairing.
  std::vector<Index> kept;
  kept.reserve(kk);
  std::size_t d = 0;
  for (Index j = 0; j < k; ++j) {
    if (d < qr.dropped.size() && qr.dropped[d] == j) {
      ++d;
      continue;
    }
    kept.push_back(j);
  }
  Matrix u_kept(n, kk), r_kept(kk, kk);
  for (Index j = 0; j < kk; ++j) {
    u_kept.col(j) = u_raw.col(kept[j]);
    r_kept.col(j) = qr.r.col(kept[j]);
  }
  u_ = r_kept.transpose()
           .triangularView<Eigen::Lower>()
           .solve(u_kept.transpose())
           .transpose();
  c_ = qr.q;
}

double RecycleSpace::pairing_error(const LinearOperator& a) const {
  double sum = 0.0;
  for (Index j = 0; j < k(); ++j)
    sum += (a(u_.col(j)) - c_.col(j)).squaredNorm();
  return std::sqrt(sum);
}

double RecycleSpace::orthonormality_error() const {
  if (empty()) return 0.0;
  return (c_.transpose() * c_ - Matrix::Identity(k(), k())).norm();
}

ProjectionResult project_initial(const LinearOperator& a, const Vector& b,
                                 const Vector& x0, const RecycleSpace& r) {
  check_system(a, b, x0, "project_initial");
  Vector r0 = x0.isZero(0.0) ? b : Vector(b - a(x0));
  if (r.empty()) return {x0, std::move(r0)};
  const Vector coef = r.c().transpose() * r0;
  Vector x1 = x0 + r.u() * coef;
  Vector r1 = b - a(x1);
  return {std::move(x1), std::move(r1)};
}

// ---------------------------------------------------------------------------
// Shared MINRES / RMINRES engine
// ---------------------------------------------------------------------------

namespace {

struct EngineOut {
  Vector x;
  SolveReport report;
  RecycleSpace recycle;
};

// Harmonic Ritz extraction over span(w): selects the k_out pairs whose
// harmonic Ritz values have the smallest magnitude and builds the new space
// against A. `aw` must hold A applied to the columns of `w`.
RecycleSpace harmonic_extract(const Matrix& w, const Matrix& aw, Index k_out,
                              const LinearOperator& a) {
  if (k_out <= 0 || w.cols() == 0) return RecycleSpace{};

  QrResult qr = orthonormalize(w, 1e-12);
  const Index kk = qr.q.cols();
  if (kk == 0) return RecycleSpace{};

  Matrix aw_kept(w.rows(), kk), r_kept(kk, kk);
  {
    std::size_t d = 0;
    Index out = 0;
    for (Index j = 0; j < w.cols(); ++j) {
      if (d < qr.dropped.size() && qr.dropped[d] == j) {
        ++d;
        continue;
      }
      aw_kept.col(out) = aw.col(j);
      r_kept.col(out) = qr.r.col(j);
      ++out;
    }
  }
  // A Q = (A W_kept) R_kept^{-1}.
  Matrix aq = r_kept.transpose()
                  .triangularView<Eigen::Lower>()
                  .solve(aw_kept.transpose())
                  .transpose();

  Matrix h1 = aq.transpose() * aq;               // (AQ)'(AQ), positive definite
  Matrix h2 = qr.q.transpose() * aq;             // Q'AQ
  h2 = 0.5 * (h2 + h2.transpose().eval());       // symmetrize rounding noise

  // Harmonic Ritz values t satisfy h1 g = t h2 g; solving h2 g = mu h1 g with
  // mu = 1/t turns the smallest |t| into the largest |mu|.
  Matrix g;
  Vector mu;
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(h2, h1);
  if (ges.info() == Eigen::Success) {
    g = ges.eigenvectors();
    mu = ges.eigenvalues();
  } else {
    // Severely rank-deficient projection: fall back to plain Ritz values of
    // the orthonormalized space and target those of smallest magnitude.
    Eigen::SelfAdjointEigenSolver<Matrix> es(h2);
    g = es.eigenvectors();
    mu = es.eigenvalues();
    for (Index i = 0; i < mu.size(); ++i)
      mu[i] = (mu[i] == 0.0) ? std::numeric_limits<double>::infinity()
                             : 1.0 / mu[i];
  }

  std::vector<Index> order(mu.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index l, Index r) {
    return std::abs(mu[l]) > std::abs(mu[r]);
  });
  const Index k_sel = std::min<Index>(k_out, mu.size());
  Matrix g_sel(kk, k_sel);
  for (Index j = 0; j < k_sel; ++j) g_sel.col(j) = g.col(order[j]);

  return RecycleSpace(a, qr.q * g_sel);
}

EngineOut minres_engine(const LinearOperator& a, const Vector& b,
                        const Vector& x0, const SolveOptions& opts,
                        const RecycleSpace* r_in, const Preconditioner* m,
                        Index k_out, bool record_deflation) {
  opts.validate();
  check_system(a, b, x0, "minres_solve");
  if (m && m->dim != a.dim)
    throw std::invalid_argument("minres_solve: preconditioner dimension " +
                                std::to_string(m->dim) +
                                " does not match operator dim " +
                                std::to_string(a.dim));
  if (m) {
    Rng probe_rng(0x9d5fUL);
    if (!probe_spd(*m, 10, probe_rng))
      throw std::runtime_error(
          "minres_solve: preconditioner failed the symmetric "
          "positive-definite probe");
  }
  const Index n = a.dim;
  const Index max_iter = opts.resolve_max_iter(n);
  const bool have_recycle = r_in != nullptr && !r_in->empty();
  const bool retain = have_recycle || k_out > 0;
  // Full reorthogonalization is forced whenever a recycle space deflates the
  // iteration (the deflation invariant depends on it); extraction-only runs
  // keep the plain recurrence so their iteration counts match MINRES.
  const bool reorth = opts.reorthogonalize || have_recycle;
  const bool need_basis = retain || reorth;

  EngineOut out;

  // Working copies of the recycle pairing. With a preconditioner the
  // deflation space is re-orthonormalized in the M^{-1} inner product; the
  // pairing A U = C survives the change of basis.
  Matrix c_mat, u_mat, cm_mat;
  Index k = 0;
  if (have_recycle) {
    c_mat = r_in->c();
    u_mat = r_in->u();
    k = c_mat.cols();
    if (m) {
      cm_mat.resize(n, k);
      for (Index j = 0; j < k; ++j)
        cm_mat.col(j) = m->apply_inverse(c_mat.col(j));
      const Matrix s = c_mat.transpose() * cm_mat;
      Eigen::LLT<Matrix> llt(0.5 * (s + s.transpose()));
      if (llt.info() != Eigen::Success)
        throw std::runtime_error(
            "rminres_solve: preconditioner metric is not positive definite "
            "on the recycle space");
      const Matrix linv_t = llt.matrixL()
                                .solve(Matrix::Identity(k, k))
                                .transpose();
      c_mat = c_mat * linv_t;
      u_mat = u_mat * linv_t;
      cm_mat = cm_mat * linv_t;
    } else {
      cm_mat = c_mat;
    }
  }

  // Initial guess update against the recycle space, then Lanczos seeding.
  Vector r0 = x0.isZero(0.0) ? b : Vector(b - a(x0));
  const double r0_norm = r0.norm();
  Vector x = x0;
  Vector r1 = r0;
  if (have_recycle) {
    const Vector coef = cm_mat.transpose() * r0;
    x = x0 + u_mat * coef;
    r1 = b - a(x);
  }

  double denom;
  if (m) {
    const Vector mb = m->apply_inverse(b);
    const double d2 = b.dot(mb);
    if (d2 < 0.0)
      throw std::runtime_error(
          "minres_solve: preconditioner is not positive definite");
    denom = std::sqrt(d2);
  } else {
    denom = b.norm();
  }
  if (denom == 0.0) denom = 1.0;  // zero rhs: absolute residual test

  Vector z1 = m ? m->apply_inverse(r1) : r1;
  const double beta1_sq = r1.dot(z1);
  if (m && beta1_sq < 0.0)
    throw std::runtime_error(
        "minres_solve: preconditioner is not positive definite");
  const double beta1 = std::sqrt(std::max(beta1_sq, 0.0));

  SolveReport& rep = out.report;
  double relres = beta1 / denom;
  if (opts.record_history) rep.relres_history.push_back(relres);

  // Retained quantities for reorthogonalization and Ritz extraction.
  std::vector<Vector> vbasis, zbasis;
  std::vector<std::vector<double>> hcols;  // per-column projected entries
  std::vector<Vector> bcols;               // per-column deflation coefficients

  Vector v = Vector::Zero(n), v_prev = Vector::Zero(n), z = Vector::Zero(n);
  if (beta1 > 0.0) {
    v = r1 / beta1;
    z = z1 / beta1;
    if (need_basis) {
      vbasis.push_back(v);
      zbasis.push_back(z);
    }
  }

  double beta = beta1;
  double dbar = 0.0, epsln = 0.0, phibar = beta1, cs = -1.0, sn = 0.0;
  Vector w = Vector::Zero(n), w2 = Vector::Zero(n);
  double scale = 0.0;
  Index iter = 0;
  bool happy = beta1 == 0.0;

  while (!happy && iter < max_iter && relres > opts.tol) {
    // beta currently couples v_prev -> v; it is the off-diagonal entry of
    // this column of T.
    const double beta_prev = beta;
    Vector q = a(z);
    Vector bvec;
    if (have_recycle) {
      bvec = cm_mat.transpose() * q;
      q -= c_mat * bvec;
    }
    const double alpha = z.dot(q);
    q -= alpha * v;
    if (iter > 0) q -= beta_prev * v_prev;

    std::vector<double> h;
    if (retain) {
      h.assign(iter + 2, 0.0);
      if (iter > 0) h[iter - 1] = beta_prev;
      h[iter] = alpha;
    }
    if (reorth) {
      for (std::size_t i = 0; i < vbasis.size(); ++i) {
        const double c = zbasis[i].dot(q);
        q -= c * vbasis[i];
        if (retain) h[i] += c;
      }
      if (have_recycle) {
        const Vector b2 = cm_mat.transpose() * q;
        q -= c_mat * b2;
        bvec += b2;
      }
    }
    // The solution update runs over z-directions folded with their recycle
    // corrections, x = x1 + sum y_j (z_j - U b_j), so the U block of the
    // small problem never needs solving explicitly.
    Vector ztilde = z;
    if (have_recycle) {
      ztilde -= u_mat * bvec;
      bcols.push_back(bvec);
    }

    Vector znext = m ? m->apply_inverse(q) : q;
    const double beta_sq = q.dot(znext);
    if (m && beta_sq < 0.0)
      throw std::runtime_error(
          "minres_solve: preconditioner is not positive definite");
    beta = std::sqrt(std::max(beta_sq, 0.0));
    scale = std::max({scale, std::abs(alpha), beta});
    if (retain) h[iter + 1] = beta;
    if (retain) hcols.push_back(std::move(h));

    if (!std::isfinite(alpha) || !std::isfinite(beta))
      throw SolverBreakdown("minres numerical breakdown at iteration " +
                            std::to_string(iter + 1));

    // Apply the previous rotations to the new column of T, then compute and
    // apply the rotation that annihilates the subdiagonal.
    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alpha;
    double gbar = sn * dbar - cs * alpha;
    epsln = sn * beta;
    dbar = -cs * beta;
    double gamma = std::hypot(gbar, beta);
    gamma = std::max(gamma, std::numeric_limits<double>::epsilon());
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;

    const Vector w1 = w2;
    w2 = w;
    w = (ztilde - oldeps * w1 - delta * w2) / gamma;
    x += phi * w;
    ++iter;

    relres = std::abs(phibar) / denom;
    if (!std::isfinite(relres))
      throw SolverBreakdown("minres numerical breakdown at iteration " +
                            std::to_string(iter));
    if (opts.record_history) rep.relres_history.push_back(relres);
    if (record_deflation && have_recycle) {
      const Vector rt = b - a(x);
      rep.deflation_history.push_back(
          (c_mat.transpose() * rt).norm() / (r0_norm > 0.0 ? r0_norm : 1.0));
    }

    if (beta <= 1e-14 * scale) break;  // invariant subspace captured
    v_prev = v;
    v = q / beta;
    z = m ? Vector(znext / beta) : v;
    if (need_basis) {
      vbasis.push_back(v);
      zbasis.push_back(z);
    }
  }

  rep.iterations = iter;
  {
    const Vector rt = b - a(x);
    if (m) {
      const Vector mrt = m->apply_inverse(rt);
      rep.final_relres = std::sqrt(std::max(rt.dot(mrt), 0.0)) / denom;
    } else {
      rep.final_relres = rt.norm() / denom;
    }
  }
  rep.converged = rep.final_relres <= opts.tol;
  out.x = std::move(x);

  // Next recycle space from the augmented search space [U | Z].
  if (k_out > 0) {
    const Index mcols = iter;
    Matrix wspace(n, k + mcols), awspace(n, k + mcols);
    if (have_recycle) {
      wspace.leftCols(k) = u_mat;
      awspace.leftCols(k) = c_mat;
    }
    if (mcols > 0) {
      const Index nv = static_cast<Index>(vbasis.size());
      Matrix vmat(n, nv), hmat = Matrix::Zero(nv, mcols);
      for (Index j = 0; j < nv; ++j) vmat.col(j) = vbasis[j];
      for (Index j = 0; j < mcols; ++j) {
        const auto& h = hcols[j];
        for (Index i = 0; i < std::min<Index>(nv, h.size()); ++i)
          hmat(i, j) = h[i];
        wspace.col(k + j) = zbasis[j];
      }
      Matrix az = vmat * hmat;
      if (have_recycle) {
        Matrix bmat(k, mcols);
        for (Index j = 0; j < mcols; ++j) bmat.col(j) = bcols[j];
        az += c_mat * bmat;
      }
      awspace.rightCols(mcols) = az;
    }
    out.recycle = harmonic_extract(wspace, awspace, k_out, a);
  }
  return out;
}

}  // namespace

SolveResult minres_solve(const LinearOperator& a, const Vector& b,
                         const Vector& x0, const SolveOptions& opts,
                         const Preconditioner* m) {
  EngineOut eng = minres_engine(a, b, x0, opts, nullptr, m, 0, false);
  return SolveResult{std::move(eng.x), std::move(eng.report)};
}

RminresResult rminres_solve(const LinearOperator& a, const Vector& b,
                            const Vector& x0, const SolveOptions& opts,
                            const RecycleSpace* r_in, const Preconditioner* m,
                            Index k_out, bool record_deflation) {
  if (k_out < 0)
    throw std::invalid_argument("rminres_solve: k_out must be >= 0");
  // The carried U is re-paired against the current operator: A changes
  // between systems, so the stored C is stale.
  RecycleSpace refreshed;
  const RecycleSpace* effective = nullptr;
  if (r_in != nullptr && !r_in->empty()) {
    refreshed = RecycleSpace(a, r_in->u());
    if (!refreshed.empty()) effective = &refreshed;
  }
  EngineOut eng =
      minres_engine(a, b, x0, opts, effective, m, k_out, record_deflation);
  return RminresResult{std::move(eng.x), std::move(eng.report),
                       std::move(eng.recycle)};
}

RecycleSpace ritz_extract(const Matrix& basis, const RecycleSpace* r_in,
                          Index k_out, const LinearOperator& a) {
  if (k_out <= 0) return RecycleSpace{};
  const Index k = (r_in != nullptr) ? r_in->k() : 0;
  Matrix w(a.dim, k + basis.cols());
  if (k > 0) w.leftCols(k) = r_in->u();
  w.rightCols(basis.cols()) = basis;
  Matrix aw(a.dim, w.cols());
  if (k > 0) aw.leftCols(k) = r_in->c();
  for (Index j = 0; j < basis.cols(); ++j)
    aw.col(k + j) = a(basis.col(j));
  return harmonic_extract(w, aw, k_out, a);
}

}  // namespace seqkrylov
