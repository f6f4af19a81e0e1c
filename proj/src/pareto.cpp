#include "seqkrylov/pareto.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "seqkrylov/rng.hpp"

namespace seqkrylov {

double ObjectiveModel::combined_value(const Vector& x, const Vector& w) const {
  double s = 0.0;
  for (int i = 0; i < n_obj; ++i) s += w[i] * value(i, x);
  return s;
}

Vector ObjectiveModel::combined_gradient(const Vector& x,
                                         const Vector& w) const {
  Vector g = Vector::Zero(dim);
  for (int i = 0; i < n_obj; ++i) g += w[i] * gradient(i, x);
  return g;
}

Vector ObjectiveModel::gradient_combination(const Vector& x,
                                            const Vector& beta) const {
  Vector g = Vector::Zero(dim);
  for (int i = 0; i < n_obj; ++i) g += beta[i] * gradient(i, x);
  return g;
}

ObjectiveModel make_biquad_model(Index n, std::uint64_t seed) {
  Rng rng(seed);
  auto c = std::make_shared<Vector>(2.0 * rng.unit_vector(n));
  ObjectiveModel m;
  m.dim = n;
  m.name = "biquad";
  m.value = [c](int i, const Vector& x) {
    return i == 0 ? 0.5 * x.squaredNorm() : 0.5 * (x - *c).squaredNorm();
  };
  m.gradient = [c](int i, const Vector& x) {
    return i == 0 ? x : Vector(x - *c);
  };
  // H(x; w) = (w1 + w2) I = I for convex weights.
  m.hess_vec = [](const Vector&, const Vector& w,
                  const Vector& v) -> Vector { return w.sum() * v; };
  m.front_param = [c](double t) { return Vector(t * *c); };
  return m;
}

ObjectiveModel make_quartic_model(Index n, std::uint64_t seed) {
  Rng rng(seed);
  auto c = std::make_shared<Vector>(2.0 * rng.unit_vector(n));
  const double gamma = 0.1;
  ObjectiveModel m;
  m.dim = n;
  m.name = "quartic";
  auto shifted = [c](int i, const Vector& x) -> Vector {
    return i == 0 ? x : Vector(x - *c);
  };
  m.value = [shifted, gamma](int i, const Vector& x) {
    const Vector d = shifted(i, x);
    return 0.5 * d.squaredNorm() + 0.25 * gamma * d.array().pow(4).sum();
  };
  m.gradient = [shifted, gamma](int i, const Vector& x) -> Vector {
    const Vector d = shifted(i, x);
    return d + gamma * d.array().cube().matrix();
  };
  m.hess_vec = [shifted, gamma](const Vector& x, const Vector& w,
                                const Vector& v) -> Vector {
    Vector out = Vector::Zero(x.size());
    for (int i = 0; i < 2; ++i) {
      const Vector d = shifted(i, x);
      out += w[i] * (v.array() * (1.0 + 3.0 * gamma * d.array().square()))
                        .matrix();
    }
    return out;
  };
  return m;
}

LinearOperator hessian_operator(const ObjectiveModel& model, const Vector& x,
                                const Vector& w) {
  if (model.hess_vec) {
    return LinearOperator{model.dim, true,
                          [&model, x, w](const Vector& v) {
                            return model.hess_vec(x, w, v);
                          }};
  }
  // Forward difference of gradients; symmetric only up to the step size.
  return LinearOperator{model.dim, true, [&model, x, w](const Vector& v) {
                          const double vn = v.norm();
                          if (vn == 0.0) return Vector(Vector::Zero(x.size()));
                          const double h = 1e-6 * (1.0 + x.norm()) / vn;
                          const Vector g0 = model.combined_gradient(x, w);
                          const Vector g1 =
                              model.combined_gradient(x + h * v, w);
                          return Vector((g1 - g0) / h);
                        }};
}

ParetoPoint make_pareto_point(const ObjectiveModel& model, const Vector& x,
                              const Vector& w) {
  ParetoPoint p;
  p.x = x;
  p.w = w;
  p.f = Vector(model.n_obj);
  for (int i = 0; i < model.n_obj; ++i) p.f[i] = model.value(i, x);
  p.stationarity_norm = model.combined_gradient(x, w).norm();
  return p;
}

PredictorResult predictor_step(const ObjectiveModel& model,
                               const ParetoPoint& p, const Vector& beta,
                               double h, PredictorSolver solver,
                               const RecycleSpace* r, const SolveOptions& opts,
                               Index k_recycle) {
  if (h <= 0.0)
    throw std::invalid_argument("predictor_step: step size must be positive");
  if (beta.size() != model.n_obj)
    throw std::invalid_argument("predictor_step: beta has wrong length");

  const LinearOperator hop = hessian_operator(model, p.x, p.w);
  const Vector rhs = model.gradient_combination(p.x, beta);
  const Vector x0 = Vector::Zero(model.dim);

  PredictorResult out;
  if (solver == PredictorSolver::Rminres) {
    RminresResult rr =
        rminres_solve(hop, rhs, x0, opts, r, nullptr, k_recycle);
    if (!rr.report.converged)
      throw PredictorError("predictor solve did not converge",
                           std::move(rr.report));
    out.x_pred = p.x + h * rr.x;
    out.recycle = std::move(rr.recycle);
    out.report = std::move(rr.report);
  } else {
    SolveResult sr = minres_solve(hop, rhs, x0, opts);
    if (!sr.report.converged)
      throw PredictorError("predictor solve did not converge",
                           std::move(sr.report));
    out.x_pred = p.x + h * sr.x;
    out.report = std::move(sr.report);
  }
  return out;
}

ParetoPoint corrector_step(const ObjectiveModel& model, const Vector& x_pred,
                           const Vector& w, double tol, Index max_iter) {
  if (tol <= 0.0)
    throw std::invalid_argument("corrector_step: tol must be positive");
  Vector x = x_pred;
  Vector g = model.combined_gradient(x, w);
  Index iters = 0;
  while (g.norm() > tol) {
    if (iters >= max_iter)
      throw CorrectorError(
          "corrector did not reach stationarity within " +
              std::to_string(max_iter) + " iterations",
          make_pareto_point(model, x, w));
    const double f0 = model.combined_value(x, w);
    const double g2 = g.squaredNorm();
    double t = 1.0;
    // Backtracking line search: halve until sufficient decrease.
    while (model.combined_value(x - t * g, w) > f0 - 1e-4 * t * g2) {
      t *= 0.5;
      if (t < 1e-20)
        throw CorrectorError("corrector line search failed",
                             make_pareto_point(model, x, w));
    }
    x -= t * g;
    g = model.combined_gradient(x, w);
    ++iters;
  }
  return make_pareto_point(model, x, w);
}

FrontTrace trace_front(const ObjectiveModel& model, const ParetoPoint& start,
                       const TraceOptions& opts) {
  if (opts.steps < 1)
    throw std::invalid_argument("trace_front: steps must be >= 1");
  FrontTrace trace;
  trace.points.push_back(start);

  const double dw = 1.0 / static_cast<double>(opts.steps);
  // Differentiating the stationarity condition gives H dx = -grad f * dweight,
  // so the weighting vector for a forward step is the negated increment.
  Vector beta(2);
  beta << dw, -dw;

  ParetoPoint p = start;
  RecycleSpace carried;
  for (Index k = 1; k <= opts.steps; ++k) {
    PredictorResult pred;
    try {
      pred = predictor_step(model, p, beta, opts.h, opts.solver,
                            carried.empty() ? nullptr : &carried, opts.predictor,
                            opts.k_recycle);
    } catch (const PredictorError& e) {
      trace.completed = false;
      trace.predictor_iters.push_back(e.report.iterations);
      return trace;
    }
    if (opts.solver == PredictorSolver::Rminres)
      carried = std::move(pred.recycle);
    trace.predictor_iters.push_back(pred.report.iterations);
    trace.total_predictor_iters += pred.report.iterations;

    Vector w = p.w;
    w[0] -= dw;
    w[1] += dw;
    w[0] = std::max(0.0, std::min(1.0, w[0]));
    w[1] = 1.0 - w[0];

    try {
      p = corrector_step(model, pred.x_pred, w, opts.corrector_tol,
                         opts.corrector_max_iter);
    } catch (const CorrectorError&) {
      trace.completed = false;
      return trace;  // accepted prefix only
    }
    trace.points.push_back(p);
  }
  return trace;
}

}  // namespace seqkrylov
