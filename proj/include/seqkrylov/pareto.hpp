#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "seqkrylov/recycling.hpp"
#include "seqkrylov/solve.hpp"
#include "seqkrylov/types.hpp"

namespace seqkrylov {

/// Smooth bi-objective model: objective and gradient evaluators plus the
/// Hessian-vector product of the weighted combination H(x; w) = sum_i w_i
/// Hess f_i(x). When hess_vec is absent a forward-difference of gradients
/// stands in.
struct ObjectiveModel {
  Index dim = 0;
  int n_obj = 2;
  std::string name;
  std::function<double(int, const Vector&)> value;
  std::function<Vector(int, const Vector&)> gradient;
  std::function<Vector(const Vector&, const Vector&, const Vector&)> hess_vec;
  /// Optional analytic Pareto set, parameterized over [0, 1].
  std::function<Vector(double)> front_param;

  double combined_value(const Vector& x, const Vector& w) const;
  Vector combined_gradient(const Vector& x, const Vector& w) const;
  /// Jacobian-weighted direction sum_i beta_i grad f_i(x).
  Vector gradient_combination(const Vector& x, const Vector& beta) const;
};

/// f1 = 0.5 ||x||^2, f2 = 0.5 ||x - c||^2 with c drawn from the seed. The
/// Pareto set is the segment {t c : t in [0, 1]} and H(x; w) = I.
ObjectiveModel make_biquad_model(Index n, std::uint64_t seed);

/// Quartic-regularized pair: f_i = 0.5||x - c_i||^2 + 0.25 g sum (x - c_i)^4
/// with c_1 = 0. Smooth and strictly convex; no closed-form front.
ObjectiveModel make_quartic_model(Index n, std::uint64_t seed);

/// H(x; w) as a matrix-free operator (analytic when the model provides it,
/// finite-difference of gradients otherwise).
LinearOperator hessian_operator(const ObjectiveModel& model, const Vector& x,
                                const Vector& w);

struct ParetoPoint {
  Vector x;
  Vector w;       // convex-combination weights, sum 1
  Vector f;       // objective values at x
  double stationarity_norm = 0.0;
};

ParetoPoint make_pareto_point(const ObjectiveModel& model, const Vector& x,
                              const Vector& w);

enum class PredictorSolver { Minres, Rminres };

struct PredictorError : std::runtime_error {
  SolveReport report;
  PredictorError(const std::string& what, SolveReport r)
      : std::runtime_error(what), report(std::move(r)) {}
};

struct CorrectorError : std::runtime_error {
  ParetoPoint last;
  CorrectorError(const std::string& what, ParetoPoint p)
      : std::runtime_error(what), last(std::move(p)) {}
};

struct PredictorResult {
  Vector x_pred;
  RecycleSpace recycle;
  SolveReport report;
};

/// Solves H(x*) v = grad f(x*) beta matrix-free and steps x_pred = x* + h v.
/// The recycle space is threaded through when solver == Rminres.
PredictorResult predictor_step(const ObjectiveModel& model,
                               const ParetoPoint& p, const Vector& beta,
                               double h, PredictorSolver solver,
                               const RecycleSpace* r,
                               const SolveOptions& opts, Index k_recycle = 10);

/// Fixed-weight scalarization descent with backtracking line search
/// (halving, sufficient-decrease constant 1e-4) until ||grad F_w|| <= tol.
/// Throws CorrectorError carrying the last iterate when max_iter runs out.
ParetoPoint corrector_step(const ObjectiveModel& model, const Vector& x_pred,
                           const Vector& w, double tol, Index max_iter);

struct FrontTrace {
  std::vector<ParetoPoint> points;
  std::vector<Index> predictor_iters;
  long long total_predictor_iters = 0;
  bool completed = true;  // false when a corrector failure truncated the trace
};

struct TraceOptions {
  Index steps = 10;
  double h = 1.0;
  PredictorSolver solver = PredictorSolver::Minres;
  Index k_recycle = 10;
  SolveOptions predictor;
  double corrector_tol = 1e-8;
  Index corrector_max_iter = 500;
};

/// Alternates predictor and corrector across the weight schedule
/// w -> w + (-1, +1)/steps, returning steps+1 points (the accepted prefix if
/// a corrector fails).
FrontTrace trace_front(const ObjectiveModel& model, const ParetoPoint& start,
                       const TraceOptions& opts);

}  // namespace seqkrylov
