#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

#include "seqkrylov/sam.hpp"
#include "seqkrylov/solve.hpp"
#include "test_util.hpp"

using namespace seqkrylov;
using namespace seqkrylov::testutil;

namespace {

SparsityPattern full_pattern(Index n) {
  SparsityPattern p;
  p.n = n;
  p.cols.resize(n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) p.cols[j].push_back(i);
  return p;
}

SparseMatrix tridiag(Index n, double diag, double off) {
  std::vector<Triplet> tr;
  for (Index i = 0; i < n; ++i) tr.push_back({i, i, diag});
  for (Index i = 0; i + 1 < n; ++i) {
    tr.push_back({i + 1, i, off});
    tr.push_back({i, i + 1, off});
  }
  return SparseMatrix::from_triplets(n, n, tr, true);
}

}  // namespace

TEST_CASE("diagonal pattern strategy") {
  SparseMatrix a = tridiag(3, 2.0, -1.0);
  SparsityPattern p = build_pattern(a, PatternStrategy::Diagonal);
  for (Index j = 0; j < 3; ++j) {
    REQUIRE(p.cols[j].size() == 1);
    CHECK(p.cols[j][0] == j);
  }
}

TEST_CASE("pattern-of-A reads the structure, diagonal included") {
  SparseMatrix a = tridiag(4, 2.0, -1.0);
  SparsityPattern p = build_pattern(a, PatternStrategy::PatternOfA);
  CHECK(p.cols[0].size() == 2);
  CHECK(p.cols[1].size() == 3);
  CHECK(p.cols[2].size() == 3);
  CHECK(p.cols[3].size() == 2);
  p.validate();
}

TEST_CASE("threshold strategy keeps the strong entries plus the diagonal") {
  std::vector<Triplet> tr{{0, 0, 1.0}, {1, 0, 0.4}, {2, 0, 0.6},
                          {1, 1, 1.0}, {2, 2, 1.0}};
  SparseMatrix a = SparseMatrix::from_triplets(3, 3, tr);
  SparsityPattern p = build_pattern(a, PatternStrategy::Threshold, 0.5);
  REQUIRE(p.cols[0].size() == 2);
  CHECK(p.cols[0][0] == 0);
  CHECK(p.cols[0][1] == 2);  // 0.4 < 0.5 * 1.0 dropped, diagonal kept
}

TEST_CASE("threshold tau is validated") {
  SparseMatrix a = SparseMatrix::identity(3);
  CHECK_THROWS_AS(build_pattern(a, PatternStrategy::Threshold, 1.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_pattern(a, PatternStrategy::Threshold, 0.0),
                  std::invalid_argument);
}

TEST_CASE("identical matrices map to the identity") {
  Rng rng(61);
  SparseMatrix a = rand_sparse_sym(rng, 12, 0.3);
  SparsityPattern p = build_pattern(a, PatternStrategy::PatternOfA);
  SamMap map = compute_sam(a, a, p);
  CHECK(map.residual_fro <= 1e-12);
  CHECK(frobenius_diff(map.n_map, SparseMatrix::identity(12)) <= 1e-12);
}

TEST_CASE("the full pattern recovers the exact map") {
  Rng rng(62);
  SparseMatrix a_k = rand_well_conditioned(rng, 6, false);
  SparseMatrix a_0 = rand_well_conditioned(rng, 6, false);
  SamMap map = compute_sam(a_k, a_0, full_pattern(6));
  CHECK(map.residual_fro <= 1e-10);
  const Matrix expect =
      a_k.to_dense().colPivHouseholderQr().solve(a_0.to_dense());
  CHECK((map.n_map.to_dense() - expect).norm() <= 1e-10 * expect.norm());
}

TEST_CASE("diagonal pattern on diagonal matrices is scalar least squares") {
  std::vector<Triplet> trk{{0, 0, 2.0}, {1, 1, 4.0}};
  std::vector<Triplet> tr0{{0, 0, 1.0}, {1, 1, 2.0}};
  SparseMatrix a_k = SparseMatrix::from_triplets(2, 2, trk, true);
  SparseMatrix a_0 = SparseMatrix::from_triplets(2, 2, tr0, true);
  SamMap map =
      compute_sam(a_k, a_0, build_pattern(a_k, PatternStrategy::Diagonal));
  CHECK(map.n_map.coeff(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(map.n_map.coeff(1, 1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(map.residual_fro <= 1e-14);
}

TEST_CASE("column residuals recombine into the Frobenius residual") {
  Rng rng(63);
  SparseMatrix a_k = rand_well_conditioned(rng, 15, true);
  SparseMatrix a_0 = rand_well_conditioned(rng, 15, true);
  SparsityPattern p = build_pattern(a_k, PatternStrategy::Threshold, 0.3);
  SamMap map = compute_sam(a_k, a_0, p);

  double sum = 0.0;
  for (double c : map.column_residuals) sum += c * c;
  CHECK(map.residual_fro ==
        doctest::Approx(std::sqrt(sum)).epsilon(1e-10));

  // Dense separability oracle.
  const double dense_res =
      (a_k.to_dense() * map.n_map.to_dense() - a_0.to_dense()).norm();
  CHECK(map.residual_fro == doctest::Approx(dense_res).epsilon(1e-10));
}

TEST_CASE("pattern-respecting perturbations never beat the minimizer") {
  Rng rng(64);
  SparseMatrix a_k = rand_well_conditioned(rng, 10, false);
  SparseMatrix a_0 = rand_well_conditioned(rng, 10, true);
  SparsityPattern p = build_pattern(a_k, PatternStrategy::Threshold, 0.2);
  SamMap map = compute_sam(a_k, a_0, p);
  const Matrix akd = a_k.to_dense();
  const Matrix a0d = a_0.to_dense();
  const Matrix nd = map.n_map.to_dense();
  for (int t = 0; t < 50; ++t) {
    Matrix delta = Matrix::Zero(10, 10);
    for (Index j = 0; j < 10; ++j)
      for (Index i : p.cols[j]) delta(i, j) = 0.1 * rng.normal();
    const double perturbed = (akd * (nd + delta) - a0d).norm();
    CHECK(perturbed >= map.residual_fro - 1e-10);
  }
}

TEST_CASE("normal-equation orthogonality per column") {
  Rng rng(65);
  SparseMatrix a_k = rand_well_conditioned(rng, 12, true);
  SparseMatrix a_0 = rand_well_conditioned(rng, 12, false);
  SparsityPattern p = build_pattern(a_k, PatternStrategy::PatternOfA);
  SamMap map = compute_sam(a_k, a_0, p);
  const Matrix akd = a_k.to_dense();
  const Matrix a0d = a_0.to_dense();
  const Matrix nd = map.n_map.to_dense();
  for (Index j = 0; j < 12; ++j) {
    const Index width = static_cast<Index>(p.cols[j].size());
    Matrix g(12, width);
    Vector n_j(width);
    for (Index t = 0; t < width; ++t) {
      g.col(t) = akd.col(p.cols[j][t]);
      n_j[t] = nd(p.cols[j][t], j);
    }
    const Vector rhs = a0d.col(j);
    const Vector normal = g.transpose() * (g * n_j - rhs);
    CHECK(normal.norm() <= 1e-8 * g.norm() * rhs.norm());
  }
}

TEST_CASE("parallel and sequential maps agree bitwise") {
  Rng rng(66);
  SparseMatrix a_k = rand_well_conditioned(rng, 25, true);
  SparseMatrix a_0 = rand_well_conditioned(rng, 25, true);
  SparsityPattern p = build_pattern(a_k, PatternStrategy::Threshold, 0.25);
  SamMap seq_map = compute_sam(a_k, a_0, p, /*threads=*/1);
  SamMap par_map = compute_sam(a_k, a_0, p, /*threads=*/4);
  REQUIRE(seq_map.n_map.values().size() == par_map.n_map.values().size());
  for (std::size_t i = 0; i < seq_map.n_map.values().size(); ++i)
    CHECK(seq_map.n_map.values()[i] == par_map.n_map.values()[i]);
  CHECK(seq_map.residual_fro == par_map.residual_fro);
}

TEST_CASE("sam_precondition composes the map after the seed") {
  SparseMatrix n_half = SparseMatrix::from_dense(0.5 * Matrix::Identity(1, 1));
  SamMap map;
  map.n_map = n_half;
  Preconditioner composed = sam_precondition(map, identity_preconditioner(1));
  Vector v(1);
  v << 4;
  CHECK(composed.apply_inverse(v)[0] == doctest::Approx(2.0));

  SamMap id_map;
  id_map.n_map = SparseMatrix::identity(3);
  Preconditioner still_id =
      sam_precondition(id_map, identity_preconditioner(3));
  const Vector w = Vector::Ones(3);
  CHECK((still_id.apply_inverse(w) - w).norm() == 0.0);
}

TEST_CASE("rank-deficient columns take the minimum-norm solution") {
  // Columns 0 and 1 of A_k are identical, so a pattern selecting both gives
  // a rank-1 local problem; the minimum-norm solution splits the weight.
  std::vector<Triplet> trk{{0, 0, 1.0}, {1, 0, 2.0}, {0, 1, 1.0},
                           {1, 1, 2.0}, {2, 2, 1.0}};
  SparseMatrix a_k = SparseMatrix::from_triplets(3, 3, trk);
  std::vector<Triplet> tr0{{0, 0, 2.0}, {1, 0, 4.0}, {1, 1, 1.0},
                           {2, 2, 1.0}};
  SparseMatrix a_0 = SparseMatrix::from_triplets(3, 3, tr0);
  SparsityPattern p;
  p.n = 3;
  p.cols = {{0, 1}, {1}, {2}};
  SamMap map = compute_sam(a_k, a_0, p);
  REQUIRE(map.rank_deficient_columns.size() == 1);
  CHECK(map.rank_deficient_columns[0] == 0);
  // Exact fit 2*(col) split evenly between the duplicate columns.
  CHECK(map.n_map.coeff(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(map.n_map.coeff(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(map.column_residuals[0] <= 1e-12);
}

TEST_CASE("empty pattern columns are flagged and produce zero columns") {
  SparsityPattern p;
  p.n = 2;
  p.cols = {{0}, {}};
  SparseMatrix a = SparseMatrix::identity(2);
  SamMap map = compute_sam(a, a, p);
  REQUIRE(map.empty_columns.size() == 1);
  CHECK(map.empty_columns[0] == 1);
  CHECK(map.n_map.coeff(1, 1) == 0.0);
  // The residual of an empty column is the norm of the target column.
  CHECK(map.column_residuals[1] == doctest::Approx(1.0));
}
