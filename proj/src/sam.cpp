#include "seqkrylov/sam.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <exception>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace seqkrylov {

Index SparsityPattern::nnz() const {
  Index total = 0;
  for (const auto& col : cols) total += static_cast<Index>(col.size());
  return total;
}

void SparsityPattern::validate() const {
  if (static_cast<Index>(cols.size()) != n)
    throw std::invalid_argument("SparsityPattern: column count mismatch");
  for (const auto& col : cols) {
    for (std::size_t p = 0; p < col.size(); ++p) {
      if (col[p] < 0 || col[p] >= n)
        throw std::invalid_argument("SparsityPattern: index out of range");
      if (p > 0 && col[p - 1] >= col[p])
        throw std::invalid_argument(
            "SparsityPattern: indices must be sorted and duplicate-free");
    }
  }
}

SparsityPattern build_pattern(const SparseMatrix& a, PatternStrategy strategy,
                              double tau) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("build_pattern: matrix must be square");
  const Index n = a.cols();
  SparsityPattern pattern;
  pattern.n = n;
  pattern.cols.resize(n);

  switch (strategy) {
    case PatternStrategy::Diagonal:
      for (Index j = 0; j < n; ++j) pattern.cols[j] = {j};
      break;
    case PatternStrategy::PatternOfA:
      for (Index j = 0; j < n; ++j) {
        auto rows = a.col_rows(j);
        std::vector<Index> s(rows.begin(), rows.end());
        auto it = std::lower_bound(s.begin(), s.end(), j);
        if (it == s.end() || *it != j) s.insert(it, j);
        pattern.cols[j] = std::move(s);
      }
      break;
    case PatternStrategy::Threshold: {
      if (!(tau > 0.0 && tau <= 1.0))
        throw std::invalid_argument(
            "build_pattern: threshold tau must lie in (0, 1], got " +
            std::to_string(tau));
      for (Index j = 0; j < n; ++j) {
        auto rows = a.col_rows(j);
        auto vals = a.col_vals(j);
        double colmax = 0.0;
        for (double v : vals) colmax = std::max(colmax, std::abs(v));
        std::vector<Index> s;
        for (std::size_t p = 0; p < rows.size(); ++p)
          if (std::abs(vals[p]) >= tau * colmax) s.push_back(rows[p]);
        auto it = std::lower_bound(s.begin(), s.end(), j);
        if (it == s.end() || *it != j) s.insert(it, j);
        pattern.cols[j] = std::move(s);
      }
      break;
    }
  }
  return pattern;
}

namespace {

// Least-squares problem for one column of the map: selects the columns of
// a_k named by the pattern, gathers the union of their row supports plus the
// support of the target column, and solves the densified problem by a
// rank-revealing orthogonal factorization (minimum-norm when deficient).
void solve_column(const SparseMatrix& a_k, const SparseMatrix& a_0, Index j,
                  const std::vector<Index>& allowed, double* out_vals,
                  double* residual, bool* rank_deficient) {
  const Index width = static_cast<Index>(allowed.size());

  std::vector<Index> support;
  for (Index s : allowed) {
    auto rows = a_k.col_rows(s);
    support.insert(support.end(), rows.begin(), rows.end());
  }
  {
    auto rows = a_0.col_rows(j);
    support.insert(support.end(), rows.begin(), rows.end());
  }
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  const Index height = static_cast<Index>(support.size());

  auto local_row = [&support](Index global) {
    return static_cast<Index>(
        std::lower_bound(support.begin(), support.end(), global) -
        support.begin());
  };

  Matrix g = Matrix::Zero(height, width);
  for (Index t = 0; t < width; ++t) {
    auto rows = a_k.col_rows(allowed[t]);
    auto vals = a_k.col_vals(allowed[t]);
    for (std::size_t p = 0; p < rows.size(); ++p)
      g(local_row(rows[p]), t) = vals[p];
  }
  Vector rhs = Vector::Zero(height);
  {
    auto rows = a_0.col_rows(j);
    auto vals = a_0.col_vals(j);
    for (std::size_t p = 0; p < rows.size(); ++p)
      rhs[local_row(rows[p])] = vals[p];
  }

  Eigen::CompleteOrthogonalDecomposition<Matrix> cod;
  cod.setThreshold(1e-12);
  cod.compute(g);
  const Vector n_j = cod.solve(rhs);
  *rank_deficient = cod.rank() < width;
  *residual = (g * n_j - rhs).norm();
  for (Index t = 0; t < width; ++t) out_vals[t] = n_j[t];
}

}  // namespace

SamMap compute_sam(const SparseMatrix& a_k, const SparseMatrix& a_0,
                   const SparsityPattern& pattern, int threads) {
  if (a_k.rows() != a_0.rows() || a_k.cols() != a_0.cols())
    throw std::invalid_argument("compute_sam: dimension mismatch");
  if (a_k.rows() != a_k.cols() || a_k.cols() != pattern.n)
    throw std::invalid_argument("compute_sam: pattern dimension mismatch");
  pattern.validate();
  const Index n = pattern.n;

  // Pre-sized output slots: column j writes vals[col_ptr[j] .. col_ptr[j+1]).
  std::vector<Index> col_ptr(n + 1, 0);
  for (Index j = 0; j < n; ++j)
    col_ptr[j + 1] = col_ptr[j] + static_cast<Index>(pattern.cols[j].size());
  std::vector<Index> row_idx(col_ptr[n]);
  std::vector<double> vals(col_ptr[n], 0.0);
  for (Index j = 0; j < n; ++j)
    std::copy(pattern.cols[j].begin(), pattern.cols[j].end(),
              row_idx.begin() + col_ptr[j]);

  std::vector<double> column_residuals(n, 0.0);
  std::vector<char> deficient(n, 0);

  auto run_range = [&](Index begin, Index end) {
    for (Index j = begin; j < end; ++j) {
      if (pattern.cols[j].empty()) continue;
      bool rd = false;
      solve_column(a_k, a_0, j, pattern.cols[j], vals.data() + col_ptr[j],
                   &column_residuals[j], &rd);
      deficient[j] = rd ? 1 : 0;
    }
  };

  int workers = threads > 0
                    ? threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (workers == 1) {
    run_range(0, n);
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    const Index chunk = (n + workers - 1) / workers;
    for (int t = 0; t < workers; ++t) {
      const Index begin = t * chunk;
      const Index end = std::min<Index>(begin + chunk, n);
      if (begin >= end) break;
      pool.emplace_back([&, begin, end] {
        try {
          run_range(begin, end);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  SamMap map;
  map.pattern = pattern;
  map.column_residuals = std::move(column_residuals);
  double sum = 0.0;
  for (Index j = 0; j < n; ++j) {
    sum += map.column_residuals[j] * map.column_residuals[j];
    if (pattern.cols[j].empty()) {
      map.empty_columns.push_back(j);
      // An all-empty column leaves a zero column in the map; the residual is
      // then the norm of the target column itself.
      double cn = 0.0;
      for (double v : a_0.col_vals(j)) cn += v * v;
      map.column_residuals[j] = std::sqrt(cn);
      sum += cn;
    } else if (deficient[j]) {
      map.rank_deficient_columns.push_back(j);
    }
  }
  map.residual_fro = std::sqrt(sum);
  map.n_map = SparseMatrix(n, n, std::move(col_ptr), std::move(row_idx),
                           std::move(vals), false);
  return map;
}

Preconditioner sam_precondition(const SamMap& map, const Preconditioner& p0) {
  if (map.n_map.rows() != p0.dim)
    throw std::invalid_argument("sam_precondition: dimension mismatch");
  auto n_map = std::make_shared<SparseMatrix>(map.n_map);
  auto base = p0.apply_inverse;
  return Preconditioner{p0.dim,
                        [n_map, base](const Vector& v) {
                          return matvec(*n_map, base(v));
                        },
                        "sam(" + p0.description + ")"};
}

}  // namespace seqkrylov
