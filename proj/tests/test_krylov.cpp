#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "seqkrylov/lanczos.hpp"
#include "seqkrylov/linalg.hpp"
#include "seqkrylov/precond.hpp"
#include "seqkrylov/solve.hpp"
#include "test_util.hpp"

using namespace seqkrylov;
using namespace seqkrylov::testutil;

namespace {

SparseMatrix diag_matrix(const std::vector<double>& d) {
  std::vector<Triplet> tr;
  for (Index i = 0; i < static_cast<Index>(d.size()); ++i)
    tr.push_back({i, i, d[i]});
  return SparseMatrix::from_triplets(d.size(), d.size(), tr, true);
}

// Direct transcription of the conjugate-residual recurrence, used as the
// iterate-fidelity oracle.
struct CrTrace {
  std::vector<double> alpha, beta;
  std::vector<Vector> x, r;
};

CrTrace cr_reference(const Matrix& h, const Vector& b, const Vector& x0,
                     double tol, int max_iter) {
  CrTrace t;
  Vector x = x0;
  Vector r = b - h * x0;
  Vector p = r;
  int i = 0;
  while (i < max_iter && r.norm() / b.norm() > tol) {
    const Vector hr = h * r;
    const Vector hp = h * p;
    const double s = hr.dot(r);
    const double alpha = s / hp.squaredNorm();
    x += alpha * p;
    r -= alpha * hp;
    const Vector hr_next = h * r;
    const double beta = hr_next.dot(r) / s;
    p = r + beta * p;
    t.alpha.push_back(alpha);
    t.beta.push_back(beta);
    t.x.push_back(x);
    t.r.push_back(r);
    ++i;
  }
  return t;
}

}  // namespace

TEST_CASE("SolveOptions validation") {
  SolveOptions opts;
  opts.tol = 0.0;
  CHECK_THROWS_AS(opts.validate(), std::invalid_argument);
  opts.tol = 1.5;
  CHECK_THROWS_AS(opts.validate(), std::invalid_argument);
  opts.tol = 1e-8;
  opts.max_iter = -1;
  CHECK_THROWS_AS(opts.validate(), std::invalid_argument);
}

TEST_CASE("cr_solve on the identity converges in one step") {
  SparseMatrix eye = SparseMatrix::identity(3);
  Vector b(3);
  b << 1, 2, 3;
  SolveResult res =
      cr_solve(make_operator(eye), b, Vector::Zero(3), SolveOptions{});
  CHECK(res.report.iterations == 1);
  CHECK(res.report.converged);
  CHECK((res.x - b).norm() <= 1e-14);
}

TEST_CASE("cr_solve diagonal systems, definite and indefinite") {
  SolveOptions opts;
  {
    SparseMatrix a = diag_matrix({2, 3});
    Vector b(2);
    b << 2, 3;
    SolveResult res = cr_solve(make_operator(a), b, Vector::Zero(2), opts);
    CHECK(res.report.iterations <= 2);
    CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res.x[1] == doctest::Approx(1.0).epsilon(1e-12));
  }
  {
    // (Hr)'r vanishes on the first sweep here; the recurrence recovery must
    // still reach the exact solution.
    SparseMatrix a = diag_matrix({1, -1});
    Vector b(2);
    b << 1, 1;
    SolveResult res = cr_solve(make_operator(a), b, Vector::Zero(2), opts);
    CHECK(res.report.iterations <= 2);
    CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res.x[1] == doctest::Approx(-1.0).epsilon(1e-12));
  }
}

TEST_CASE("cr_solve follows the reference recurrence iterate for iterate") {
  Rng rng(31);
  SparseMatrix a = rand_well_conditioned(rng, 12, false);
  const Vector b = rng.normal_vector(12);
  SolveOptions opts;
  opts.tol = 1e-10;
  SolveResult res = cr_solve(make_operator(a), b, Vector::Zero(12), opts);
  CrTrace ref = cr_reference(a.to_dense(), b, Vector::Zero(12), 1e-10, 12);
  REQUIRE(res.report.iterations == static_cast<Index>(ref.x.size()));
  CHECK((res.x - ref.x.back()).norm() <= 1e-10 * ref.x.back().norm());
  for (std::size_t i = 0; i + 1 < ref.r.size(); ++i) {
    const double refval = ref.r[i].norm() / b.norm();
    CHECK(std::abs(res.report.relres_history[i + 1] - refval) <=
          1e-10 + 1e-7 * refval);
  }
}

TEST_CASE("cr_solve returns zero for a zero right-hand side") {
  SparseMatrix a = diag_matrix({2, 3});
  SolveResult res =
      cr_solve(make_operator(a), Vector::Zero(2), Vector::Ones(2),
               SolveOptions{});
  CHECK(res.report.iterations == 0);
  CHECK(res.report.converged);
  CHECK(res.x.norm() == 0.0);
}

TEST_CASE("cr_solve reports breakdown on a vanishing direction image") {
  SparseMatrix zero = SparseMatrix::from_triplets(2, 2, {}, true);
  Vector b(2);
  b << 1, 1;
  CHECK_THROWS_WITH_AS(
      cr_solve(make_operator(zero), b, Vector::Zero(2), SolveOptions{}),
      doctest::Contains("CR breakdown"), SolverBreakdown);
}

TEST_CASE("minres_solve identity system") {
  SparseMatrix eye = SparseMatrix::identity(6);
  Rng rng(2);
  const Vector b = rng.normal_vector(6);
  SolveResult res =
      minres_solve(make_operator(eye), b, Vector::Zero(6), SolveOptions{});
  CHECK(res.report.iterations == 1);
  CHECK(res.report.converged);
  CHECK((res.x - b).norm() <= 1e-12 * b.norm());
}

TEST_CASE("minres_solve reaches the exact solution of diag(1..10)") {
  std::vector<double> d(10);
  for (int i = 0; i < 10; ++i) d[i] = i + 1.0;
  SparseMatrix a = diag_matrix(d);
  const Vector b = Vector::Ones(10);
  SolveResult res =
      minres_solve(make_operator(a), b, Vector::Zero(10), SolveOptions{});
  CHECK(res.report.iterations <= 10);
  CHECK(res.report.converged);
  for (int i = 0; i < 10; ++i)
    CHECK(res.x[i] == doctest::Approx(1.0 / (i + 1.0)).epsilon(1e-8));
}

TEST_CASE("a perfect preconditioner converges in one iteration") {
  std::vector<double> d(10);
  for (int i = 0; i < 10; ++i) d[i] = i + 1.0;
  SparseMatrix a = diag_matrix(d);
  const Vector b = Vector::Ones(10);
  Preconditioner m = jacobi_precond(a);
  SolveResult res =
      minres_solve(make_operator(a), b, Vector::Zero(10), SolveOptions{}, &m);
  CHECK(res.report.iterations == 1);
  CHECK(res.report.converged);
}

TEST_CASE("ic0-preconditioned minres solves an SPD system faster") {
  Rng rng(19);
  // Diagonally dominant SPD matrix with off-diagonal structure.
  const Index n = 40;
  std::vector<Triplet> tr;
  for (Index i = 0; i < n; ++i) tr.push_back({i, i, 4.0 + rng.uniform()});
  for (Index i = 0; i + 1 < n; ++i) {
    const double v = -1.0 + 0.2 * rng.uniform();
    tr.push_back({i + 1, i, v});
    tr.push_back({i, i + 1, v});
  }
  for (Index i = 0; i + 7 < n; ++i) {
    tr.push_back({i + 7, i, -0.5});
    tr.push_back({i, i + 7, -0.5});
  }
  SparseMatrix a = SparseMatrix::from_triplets(n, n, tr, true);
  const Vector b = rng.normal_vector(n);
  SolveOptions opts;
  opts.tol = 1e-10;

  Preconditioner m = ic0(a);
  SolveResult plain = minres_solve(make_operator(a), b, Vector::Zero(n), opts);
  SolveResult pre =
      minres_solve(make_operator(a), b, Vector::Zero(n), opts, &m);
  REQUIRE(plain.report.converged);
  REQUIRE(pre.report.converged);
  CHECK(pre.report.iterations <= plain.report.iterations);
  const Vector exact = direct_solve(a, b);
  CHECK((pre.x - exact).norm() <= 1e-7 * exact.norm());
}

TEST_CASE("an indefinite operator is rejected as a preconditioner") {
  SparseMatrix a = SparseMatrix::identity(6);
  Preconditioner bad{6, [](const Vector& v) { return Vector(-v); },
                     "negated"};
  CHECK_THROWS_AS(minres_solve(make_operator(a), Vector::Ones(6),
                               Vector::Zero(6), SolveOptions{}, &bad),
                  std::runtime_error);
}

TEST_CASE("minres_solve honors max_iter and reports nonconvergence") {
  Rng rng(17);
  SparseMatrix a = rand_well_conditioned(rng, 20, true);
  const Vector b = rng.normal_vector(20);
  SolveOptions opts;
  opts.tol = 1e-14;
  opts.max_iter = 1;
  SolveResult res = minres_solve(make_operator(a), b, Vector::Zero(20), opts);
  CHECK(res.report.iterations == 1);
  CHECK_FALSE(res.report.converged);
}

TEST_CASE("minres_solve honors a nonzero initial guess") {
  Rng rng(7);
  SparseMatrix a = rand_well_conditioned(rng, 25, true);
  const Vector b = rng.normal_vector(25);
  const Vector x0 = rng.normal_vector(25);
  SolveOptions opts;
  opts.tol = 1e-10;
  opts.max_iter = 60;
  SolveResult res = minres_solve(make_operator(a), b, x0, opts);
  REQUIRE(res.report.converged);
  const Vector exact = direct_solve(a, b);
  CHECK((res.x - exact).norm() <= 1e-7 * exact.norm());
}

TEST_CASE("minres residual history is nonincreasing") {
  Rng rng(23);
  for (int t = 0; t < 25; ++t) {
    const Index n = 5 + static_cast<Index>(rng.below(40));
    SparseMatrix a = rand_well_conditioned(rng, n, t % 2 == 0);
    const Vector b = rng.normal_vector(n);
    SolveResult res =
        minres_solve(make_operator(a), b, Vector::Zero(n), SolveOptions{});
    const auto& h = res.report.relres_history;
    REQUIRE(h.size() == static_cast<std::size_t>(res.report.iterations + 1));
    for (std::size_t i = 1; i < h.size(); ++i)
      CHECK(h[i] <= h[i - 1] + 1e-12);
  }
}

TEST_CASE("each minres iterate attains the true Krylov residual minimum") {
  Rng rng(67);
  SparseMatrix a = rand_well_conditioned(rng, 14, true);
  const Matrix ad = a.to_dense();
  const Vector b = rng.normal_vector(14);
  SolveOptions opts;
  opts.tol = 1e-12;
  SolveResult res = minres_solve(make_operator(a), b, Vector::Zero(14), opts);

  // Brute-force oracle: orthonormal Krylov basis, dense least squares per
  // dimension.
  Matrix krylov(14, 14);
  Vector v = b;
  for (Index j = 0; j < 14; ++j) {
    krylov.col(j) = v;
    v = ad * v;
  }
  for (Index j = 1;
       j <= res.report.iterations && j < 14; ++j) {
    QrResult qr = orthonormalize(krylov.leftCols(j));
    if (!qr.dropped.empty()) break;
    const Matrix aq = ad * qr.q;
    const Vector y = aq.colPivHouseholderQr().solve(b);
    const double best = (b - aq * y).norm() / b.norm();
    const double got = res.report.relres_history[j];
    CHECK(std::abs(got - best) <= 1e-9 + 1e-6 * best);
  }
}

TEST_CASE("CR and MINRES agree where both converge") {
  Rng rng(29);
  for (int t = 0; t < 10; ++t) {
    const Index n = 8 + static_cast<Index>(rng.below(30));
    SparseMatrix a = rand_well_conditioned(rng, n, t % 2 == 1);
    const Vector b = rng.normal_vector(n);
    SolveOptions opts;
    opts.tol = 1e-10;
    opts.max_iter = n + 2;
    SolveResult mr = minres_solve(make_operator(a), b, Vector::Zero(n), opts);
    SolveResult cr = cr_solve(make_operator(a), b, Vector::Zero(n), opts);
    REQUIRE(mr.report.converged);
    REQUIRE(cr.report.converged);
    CHECK((mr.x - cr.x).norm() <= 1e-6 * mr.x.norm());
  }
}

TEST_CASE("finite termination within n + 2 iterations") {
  Rng rng(37);
  for (int t = 0; t < 8; ++t) {
    const Index n = 10 + static_cast<Index>(rng.below(41));
    SparseMatrix a = rand_well_conditioned(rng, n, t % 2 == 0);
    const Vector b = rng.normal_vector(n);
    SolveOptions opts;
    opts.tol = 1e-10;
    opts.max_iter = n + 2;
    SolveResult mr = minres_solve(make_operator(a), b, Vector::Zero(n), opts);
    SolveResult cr = cr_solve(make_operator(a), b, Vector::Zero(n), opts);
    CHECK(mr.report.converged);
    CHECK(cr.report.converged);
  }
}

TEST_CASE("lanczos on a 1x1 operator breaks down immediately") {
  SparseMatrix a = diag_matrix({2.0});
  Vector v0(1);
  v0 << 1;
  LanczosState s = lanczos_init(v0);
  lanczos_step(make_operator(a), s);
  REQUIRE(s.steps() == 1);
  CHECK(s.alpha[0] == doctest::Approx(2.0));
  CHECK(s.breakdown);
}

TEST_CASE("lanczos recurrence on a hand-computed 2x2") {
  std::vector<Triplet> tr{{0, 0, 2.0}, {1, 1, 2.0}, {0, 1, 1.0}, {1, 0, 1.0}};
  SparseMatrix a = SparseMatrix::from_triplets(2, 2, tr, true);
  Vector v0(2);
  v0 << 1, 0;
  LanczosState s = lanczos_init(v0);
  LinearOperator op = make_operator(a);
  lanczos_step(op, s);
  REQUIRE(s.steps() == 1);
  CHECK(s.alpha[0] == doctest::Approx(2.0));
  CHECK(s.beta[0] == doctest::Approx(1.0));
  CHECK_FALSE(s.breakdown);
  lanczos_step(op, s);
  REQUIRE(s.steps() == 2);
  CHECK(s.alpha[1] == doctest::Approx(2.0));
  CHECK(s.breakdown);
}

TEST_CASE("full-length reorthogonalized lanczos recovers the spectrum") {
  Rng rng(41);
  SparseMatrix a = rand_sparse_sym(rng, 8, 0.6);
  const Vector start = rng.unit_vector(8);
  LanczosState s = lanczos_init(start, nullptr, /*reorthogonalize=*/true);
  LinearOperator op = make_operator(a);
  for (int i = 0; i < 8 && !s.breakdown; ++i) lanczos_step(op, s);
  const std::vector<double> got = lanczos_eigenvalues(s);
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.to_dense());
  REQUIRE(got.size() == 8);
  for (int i = 0; i < 8; ++i)
    CHECK(got[i] == doctest::Approx(es.eigenvalues()[i]).epsilon(1e-9));
}

TEST_CASE("lanczos vectors stay locally orthogonal") {
  Rng rng(43);
  SparseMatrix a = rand_sparse_sym(rng, 20, 0.4);
  LanczosState s = lanczos_init(rng.unit_vector(20));
  LinearOperator op = make_operator(a);
  for (int i = 0; i < 10 && !s.breakdown; ++i) {
    const Vector prev = s.v;
    lanczos_step(op, s);
    if (!s.breakdown) CHECK(std::abs(s.v.dot(prev)) <= 1e-10);
  }
}

TEST_CASE("preconditioned lanczos captures the preconditioned spectrum") {
  // With M = A the preconditioned operator is the identity: one step,
  // alpha = 1, immediate breakdown.
  std::vector<Triplet> tr{{0, 0, 2.0}, {1, 1, 5.0}, {2, 2, 9.0}};
  SparseMatrix a = SparseMatrix::from_triplets(3, 3, tr, true);
  Preconditioner m = jacobi_precond(a);
  Rng rng(3);
  LanczosState s = lanczos_init(rng.unit_vector(3), &m);
  lanczos_step(make_operator(a), s, &m);
  REQUIRE(s.steps() == 1);
  CHECK(s.alpha[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.breakdown);
}

TEST_CASE("tridiagonal eigenvalues stay within the spectral interval") {
  Rng rng(47);
  for (int t = 0; t < 6; ++t) {
    const Index n = 10 + static_cast<Index>(rng.below(20));
    SparseMatrix a = rand_sparse_sym(rng, n, 0.4);
    Eigen::SelfAdjointEigenSolver<Matrix> es(a.to_dense());
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    const double eps = 1e-8 * std::max(std::abs(lo), std::abs(hi));

    LanczosState s = lanczos_init(rng.unit_vector(n));
    LinearOperator op = make_operator(a);
    for (Index i = 0; i < n && !s.breakdown; ++i) lanczos_step(op, s);
    for (double ritz : lanczos_eigenvalues(s)) {
      CHECK(ritz >= lo - eps);
      CHECK(ritz <= hi + eps);
    }
  }
}
