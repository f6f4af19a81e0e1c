#include <doctest.h>

#include <cmath>

#include "seqkrylov/pareto.hpp"
#include "test_util.hpp"

using namespace seqkrylov;
using namespace seqkrylov::testutil;

namespace {

Vector weights(double w1) {
  Vector w(2);
  w << w1, 1.0 - w1;
  return w;
}

// Central finite difference of the objective, the gradient oracle.
Vector fd_gradient(const ObjectiveModel& m, int i, const Vector& x) {
  Vector g(m.dim);
  const double h = 1e-6;
  for (Index d = 0; d < m.dim; ++d) {
    Vector xp = x, xm = x;
    xp[d] += h;
    xm[d] -= h;
    g[d] = (m.value(i, xp) - m.value(i, xm)) / (2.0 * h);
  }
  return g;
}

}  // namespace

TEST_CASE("built-in model gradients match finite differences") {
  Rng rng(81);
  for (const auto& model :
       {make_biquad_model(6, 7), make_quartic_model(6, 7)}) {
    for (int t = 0; t < 5; ++t) {
      const Vector x = rng.normal_vector(6);
      for (int i = 0; i < 2; ++i) {
        const Vector g = model.gradient(i, x);
        const Vector fd = fd_gradient(model, i, x);
        CHECK((g - fd).norm() <= 1e-5 * (g.norm() + 1.0));
      }
    }
  }
}

TEST_CASE("hessian-vector products match finite differences of gradients") {
  Rng rng(82);
  const ObjectiveModel model = make_quartic_model(8, 11);
  for (int t = 0; t < 20; ++t) {
    const Vector x = rng.normal_vector(8);
    const Vector v = rng.normal_vector(8);
    const Vector w = weights(rng.uniform());
    const Vector hv = model.hess_vec(x, w, v);
    const double h = 1e-5;
    const Vector fd = (model.combined_gradient(x + h * v, w) -
                       model.combined_gradient(x - h * v, w)) /
                      (2.0 * h);
    CHECK((hv - fd).norm() <= 1e-4 * (hv.norm() + 1.0));
  }
}

TEST_CASE("hessian operators probe as symmetric") {
  Rng rng(83);
  const ObjectiveModel model = make_quartic_model(7, 3);
  const Vector x = rng.normal_vector(7);
  const LinearOperator h = hessian_operator(model, x, weights(0.3));
  CHECK(probe_symmetry(h, 20, rng));
  CHECK(probe_linearity(h, 20, rng));
}

TEST_CASE("finite-difference hessian fallback approximates the analytic one") {
  Rng rng(84);
  ObjectiveModel model = make_quartic_model(6, 5);
  ObjectiveModel fd_model = model;
  fd_model.hess_vec = nullptr;
  const Vector x = rng.normal_vector(6);
  const Vector v = rng.normal_vector(6);
  const Vector w = weights(0.5);
  const Vector exact = hessian_operator(model, x, w)(v);
  const Vector approx = hessian_operator(fd_model, x, w)(v);
  CHECK((exact - approx).norm() <= 1e-4 * (exact.norm() + 1.0));
}

TEST_CASE("zero beta gives a zero predictor direction") {
  const ObjectiveModel model = make_biquad_model(10, 13);
  const ParetoPoint p =
      make_pareto_point(model, Vector::Zero(10), weights(1.0));
  PredictorResult pred =
      predictor_step(model, p, Vector::Zero(2), 1.0, PredictorSolver::Minres,
                     nullptr, SolveOptions{});
  CHECK((pred.x_pred - p.x).norm() == 0.0);
  CHECK(pred.report.iterations <= 1);
}

TEST_CASE("predictor direction on the bi-quadratic model is collinear with c") {
  const ObjectiveModel model = make_biquad_model(12, 17);
  const Vector c = model.front_param(1.0);
  const Vector x_star = 0.5 * c;
  const ParetoPoint p = make_pareto_point(model, x_star, weights(0.5));
  Vector beta(2);
  beta << 0.1, -0.1;
  PredictorResult pred = predictor_step(model, p, beta, 1.0,
                                        PredictorSolver::Minres, nullptr,
                                        SolveOptions{});
  // v = beta1 x* + beta2 (x* - c) = 0.1 c, so the step stays on the segment.
  const Vector v = pred.x_pred - x_star;
  CHECK((v - 0.1 * c).norm() <= 1e-8 * c.norm());
}

TEST_CASE("minres and rminres predictors agree") {
  const ObjectiveModel model = make_biquad_model(12, 19);
  const Vector c = model.front_param(1.0);
  const ParetoPoint p = make_pareto_point(model, 0.5 * c, weights(0.5));
  Vector beta(2);
  beta << 0.1, -0.1;
  PredictorResult a = predictor_step(model, p, beta, 1.0,
                                     PredictorSolver::Minres, nullptr,
                                     SolveOptions{});
  PredictorResult b = predictor_step(model, p, beta, 1.0,
                                     PredictorSolver::Rminres, nullptr,
                                     SolveOptions{});
  CHECK((a.x_pred - b.x_pred).norm() <= 1e-8);
}

TEST_CASE("corrector returns a stationary point unchanged") {
  const ObjectiveModel model = make_biquad_model(9, 23);
  const Vector c = model.front_param(1.0);
  // x = w2 c is the exact scalarization minimizer.
  const Vector x = 0.25 * c;
  ParetoPoint p = corrector_step(model, x, weights(0.75), 1e-8, 100);
  CHECK((p.x - x).norm() == 0.0);
  CHECK(p.stationarity_norm <= 1e-8);
}

TEST_CASE("corrector pulls a perturbed point back to the minimizer") {
  Rng rng(85);
  const ObjectiveModel model = make_biquad_model(9, 29);
  const Vector c = model.front_param(1.0);
  const Vector target = 0.5 * c;
  Vector perturb = rng.normal_vector(9);
  perturb -= perturb.dot(c.normalized()) * c.normalized();
  const Vector x_pred = target + 0.01 * perturb;
  ParetoPoint p = corrector_step(model, x_pred, weights(0.5), 1e-10, 200);
  CHECK((p.x - target).norm() <= 1e-9);
}

TEST_CASE("corrector with endpoint weights finds the single-objective optimum") {
  const ObjectiveModel model = make_biquad_model(9, 31);
  ParetoPoint p = corrector_step(model, Vector::Ones(9), weights(1.0), 1e-10,
                                 500);
  CHECK(p.x.norm() <= 1e-9);
}

TEST_CASE("corrector failure carries the last iterate") {
  const ObjectiveModel model = make_biquad_model(5, 37);
  CHECK_THROWS_AS(
      corrector_step(model, Vector::Ones(5), weights(0.5), 1e-12, 0),
      CorrectorError);
}

TEST_CASE("traced front lies on the analytic segment") {
  const ObjectiveModel model = make_biquad_model(20, 41);
  const Vector c = model.front_param(1.0);
  ParetoPoint start = corrector_step(model, Vector::Zero(20), weights(1.0),
                                     1e-10, 200);
  TraceOptions opts;
  opts.steps = 10;
  FrontTrace trace = trace_front(model, start, opts);
  REQUIRE(trace.completed);
  REQUIRE(trace.points.size() == 11);
  const Vector dir = c.normalized();
  for (const auto& p : trace.points) {
    const Vector off_segment = p.x - p.x.dot(dir) * dir;
    CHECK(off_segment.norm() <= 1e-6);
  }
  // Objective monotonicity along the trace.
  for (std::size_t i = 1; i < trace.points.size(); ++i) {
    CHECK(trace.points[i].f[0] >= trace.points[i - 1].f[0] - 1e-8);
    CHECK(trace.points[i].f[1] <= trace.points[i - 1].f[1] + 1e-8);
  }
}

TEST_CASE("steps = 1 traces exactly the two endpoints") {
  const ObjectiveModel model = make_biquad_model(15, 43);
  const Vector c = model.front_param(1.0);
  ParetoPoint start = corrector_step(model, Vector::Zero(15), weights(1.0),
                                     1e-10, 200);
  TraceOptions opts;
  opts.steps = 1;
  FrontTrace trace = trace_front(model, start, opts);
  REQUIRE(trace.points.size() == 2);
  CHECK(trace.points[0].x.norm() <= 1e-9);          // argmin f1
  CHECK((trace.points[1].x - c).norm() <= 1e-6);    // argmin f2
}

TEST_CASE("recycling trace matches the plain trace and costs no more") {
  const ObjectiveModel model = make_biquad_model(50, 47);
  ParetoPoint start = corrector_step(model, Vector::Zero(50), weights(1.0),
                                     1e-10, 200);
  TraceOptions plain;
  plain.steps = 10;
  TraceOptions recycled = plain;
  recycled.solver = PredictorSolver::Rminres;
  FrontTrace a = trace_front(model, start, plain);
  FrontTrace b = trace_front(model, start, recycled);
  REQUIRE(a.completed);
  REQUIRE(b.completed);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i)
    CHECK((a.points[i].x - b.points[i].x).norm() <= 1e-6);
  CHECK(b.total_predictor_iters <= a.total_predictor_iters);
}

TEST_CASE("successive predictor systems are close") {
  // For the bi-quadratic model the weighted Hessian is constant, so the
  // densified operators at successive trace points are exactly equal.
  const ObjectiveModel model = make_biquad_model(8, 59);
  ParetoPoint start = corrector_step(model, Vector::Zero(8), weights(1.0),
                                     1e-10, 200);
  TraceOptions opts;
  opts.steps = 4;
  FrontTrace trace = trace_front(model, start, opts);
  REQUIRE(trace.completed);

  auto densify = [&model](const ParetoPoint& p) {
    const LinearOperator h = hessian_operator(model, p.x, p.w);
    Matrix out(8, 8);
    for (Index j = 0; j < 8; ++j) {
      Vector e = Vector::Zero(8);
      e[j] = 1.0;
      out.col(j) = h(e);
    }
    return SparseMatrix::from_dense(out, 0.0, true);
  };
  for (std::size_t i = 1; i < trace.points.size(); ++i) {
    CHECK(frobenius_diff(densify(trace.points[i]),
                         densify(trace.points[i - 1])) <= 1e-10);
  }
}

TEST_CASE("every accepted point meets the stationarity certificate") {
  const ObjectiveModel model = make_quartic_model(12, 53);
  ParetoPoint start = corrector_step(model, Vector::Zero(12), weights(1.0),
                                     1e-8, 500);
  TraceOptions opts;
  opts.steps = 5;
  opts.corrector_tol = 1e-8;
  FrontTrace trace = trace_front(model, start, opts);
  REQUIRE(trace.completed);
  for (const auto& p : trace.points) CHECK(p.stationarity_norm <= 1e-8);
}
