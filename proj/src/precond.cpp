#include "seqkrylov/precond.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

namespace seqkrylov {

Preconditioner jacobi_precond(const SparseMatrix& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("jacobi_precond: matrix must be square");
  auto diag = std::make_shared<Vector>(a.diagonal());
  for (Index i = 0; i < diag->size(); ++i) {
    if (std::abs((*diag)[i]) <= 1e-14)
      throw std::invalid_argument(
          "jacobi_precond: near-zero diagonal entry at index " +
          std::to_string(i));
  }
  return Preconditioner{
      a.rows(),
      [diag](const Vector& v) -> Vector { return v.array() / diag->array(); },
      "jacobi"};
}

namespace {

// One zero-fill factorization attempt over the lower-triangular pattern.
// Returns false on a nonpositive pivot (position reported via *bad_col).
bool try_ic0(const SparseMatrix& a, double shift, SparseMatrix* out,
             Index* bad_col) {
  const Index n = a.rows();
  SparseMatrix l = lower_triangle(a);
  std::vector<double> vals(l.values());
  const std::vector<Index>& col_ptr = l.col_ptr();
  const std::vector<Index>& row_idx = l.row_idx();

  // row_entries[i]: finished entries L_ik as (column k, value position),
  // the left-looking access path.
  std::vector<std::vector<std::pair<Index, Index>>> row_entries(n);
  std::vector<Index> pos(n, -1);     // row -> position in the current column
  std::vector<double> work(n, 0.0);  // dense accumulator over the pattern

  for (Index j = 0; j < n; ++j) {
    const Index begin = col_ptr[j];
    const Index end = col_ptr[j + 1];
    if (begin == end || row_idx[begin] != j)
      throw std::runtime_error(
          "ic0: missing diagonal entry in column " + std::to_string(j));
    for (Index p = begin; p < end; ++p) {
      pos[row_idx[p]] = p;
      work[row_idx[p]] = vals[p];
    }
    work[j] += shift;

    // Subtract contributions of earlier columns k with L_jk != 0, restricted
    // to the pattern of column j (zero fill).
    for (const auto& [k, p_jk] : row_entries[j]) {
      const double ljk = vals[p_jk];
      if (ljk == 0.0) continue;
      for (Index p = p_jk; p < col_ptr[k + 1]; ++p) {
        const Index i = row_idx[p];
        if (pos[i] >= 0) work[i] -= vals[p] * ljk;
      }
    }

    const double pivot = work[j];
    if (pivot <= 0.0) {
      for (Index p = begin; p < end; ++p) pos[row_idx[p]] = -1;
      *bad_col = j;
      return false;
    }
    const double ljj = std::sqrt(pivot);
    vals[begin] = ljj;
    for (Index p = begin + 1; p < end; ++p) {
      vals[p] = work[row_idx[p]] / ljj;
      row_entries[row_idx[p]].emplace_back(j, p);
    }
    for (Index p = begin; p < end; ++p) pos[row_idx[p]] = -1;
  }

  *out = SparseMatrix(n, n, col_ptr, row_idx, std::move(vals), false);
  return true;
}

}  // namespace

SparseMatrix ic0_factor(const SparseMatrix& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("ic0: matrix must be square");
  SparseMatrix l;
  Index bad = -1;
  if (try_ic0(a, 0.0, &l, &bad)) return l;
  // Single diagonal-shift retry, then give up.
  const double shift = 1e-3 * a.diagonal().cwiseAbs().maxCoeff();
  if (try_ic0(a, shift, &l, &bad)) return l;
  throw std::runtime_error("ic0: not IC-factorizable (nonpositive pivot at " +
                           std::to_string(bad) + " after diagonal shift)");
}

Vector lower_solve(const SparseMatrix& l, Vector b) {
  const Index n = l.cols();
  for (Index j = 0; j < n; ++j) {
    auto rows = l.col_rows(j);
    auto vals = l.col_vals(j);
    b[j] /= vals[0];  // first stored entry of the column is the diagonal
    const double xj = b[j];
    for (std::size_t p = 1; p < rows.size(); ++p) b[rows[p]] -= vals[p] * xj;
  }
  return b;
}

Vector lower_transpose_solve(const SparseMatrix& l, Vector b) {
  const Index n = l.cols();
  for (Index j = n - 1; j >= 0; --j) {
    auto rows = l.col_rows(j);
    auto vals = l.col_vals(j);
    double s = b[j];
    for (std::size_t p = 1; p < rows.size(); ++p) s -= vals[p] * b[rows[p]];
    b[j] = s / vals[0];
  }
  return b;
}

Preconditioner ic0(const SparseMatrix& a) {
  auto l = std::make_shared<SparseMatrix>(ic0_factor(a));
  return Preconditioner{a.rows(),
                        [l](const Vector& v) {
                          return lower_transpose_solve(*l,
                                                       lower_solve(*l, v));
                        },
                        "ic0"};
}

}  // namespace seqkrylov
