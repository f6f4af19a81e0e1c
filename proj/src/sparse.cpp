#include "seqkrylov/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace seqkrylov {

namespace {

std::string dims(Index r, Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

SparseMatrix::SparseMatrix(Index n_rows, Index n_cols,
                           std::vector<Index> col_ptr,
                           std::vector<Index> row_idx,
                           std::vector<double> vals, bool symmetric)
    : n_rows_(n_rows),
      n_cols_(n_cols),
      col_ptr_(std::move(col_ptr)),
      row_idx_(std::move(row_idx)),
      vals_(std::move(vals)),
      symmetric_(symmetric) {
  if (n_rows_ < 0 || n_cols_ < 0)
    throw std::invalid_argument("SparseMatrix: negative dimension");
  if (static_cast<Index>(col_ptr_.size()) != n_cols_ + 1)
    throw std::invalid_argument("SparseMatrix: col_ptr size must be n_cols+1");
  if (col_ptr_.front() != 0)
    throw std::invalid_argument("SparseMatrix: col_ptr[0] must be 0");
  if (col_ptr_.back() != static_cast<Index>(vals_.size()) ||
      row_idx_.size() != vals_.size())
    throw std::invalid_argument("SparseMatrix: entry array size mismatch");
  for (Index j = 0; j < n_cols_; ++j) {
    if (col_ptr_[j] > col_ptr_[j + 1])
      throw std::invalid_argument("SparseMatrix: col_ptr not nondecreasing");
    for (Index p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) {
      if (row_idx_[p] < 0 || row_idx_[p] >= n_rows_)
        throw std::invalid_argument("SparseMatrix: row index out of range");
      if (p > col_ptr_[j] && row_idx_[p - 1] >= row_idx_[p])
        throw std::invalid_argument(
            "SparseMatrix: row indices must be strictly increasing per "
            "column");
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(Index n_rows, Index n_cols,
                                         std::span<const Triplet> entries,
                                         bool symmetric) {
  std::vector<std::vector<std::pair<Index, double>>> buckets(n_cols);
  for (const Triplet& t : entries) {
    if (t.row < 0 || t.row >= n_rows || t.col < 0 || t.col >= n_cols)
      throw std::invalid_argument("from_triplets: index out of range");
    buckets[t.col].emplace_back(t.row, t.value);
  }
  std::vector<Index> col_ptr(n_cols + 1, 0);
  std::vector<Index> row_idx;
  std::vector<double> vals;
  row_idx.reserve(entries.size());
  vals.reserve(entries.size());
  for (Index j = 0; j < n_cols; ++j) {
    auto& bucket = buckets[j];
    std::sort(bucket.begin(), bucket.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t p = 0; p < bucket.size(); ++p) {
      if (!row_idx.empty() &&
          static_cast<Index>(row_idx.size()) > col_ptr[j] &&
          row_idx.back() == bucket[p].first) {
        vals.back() += bucket[p].second;  // duplicates summed
      } else {
        row_idx.push_back(bucket[p].first);
        vals.push_back(bucket[p].second);
      }
    }
    col_ptr[j + 1] = static_cast<Index>(row_idx.size());
  }
  return SparseMatrix(n_rows, n_cols, std::move(col_ptr), std::move(row_idx),
                      std::move(vals), symmetric);
}

SparseMatrix SparseMatrix::identity(Index n) {
  std::vector<Index> col_ptr(n + 1);
  std::vector<Index> row_idx(n);
  std::vector<double> vals(n, 1.0);
  for (Index j = 0; j <= n; ++j) col_ptr[j] = j;
  for (Index j = 0; j < n; ++j) row_idx[j] = j;
  return SparseMatrix(n, n, std::move(col_ptr), std::move(row_idx),
                      std::move(vals), true);
}

SparseMatrix SparseMatrix::from_dense(const Matrix& dense, double drop_tol,
                                      bool symmetric) {
  std::vector<Index> col_ptr(dense.cols() + 1, 0);
  std::vector<Index> row_idx;
  std::vector<double> vals;
  for (Index j = 0; j < dense.cols(); ++j) {
    for (Index i = 0; i < dense.rows(); ++i) {
      if (std::abs(dense(i, j)) > drop_tol) {
        row_idx.push_back(i);
        vals.push_back(dense(i, j));
      }
    }
    col_ptr[j + 1] = static_cast<Index>(row_idx.size());
  }
  return SparseMatrix(dense.rows(), dense.cols(), std::move(col_ptr),
                      std::move(row_idx), std::move(vals), symmetric);
}

Matrix SparseMatrix::to_dense() const {
  Matrix d = Matrix::Zero(n_rows_, n_cols_);
  for (Index j = 0; j < n_cols_; ++j)
    for (Index p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p)
      d(row_idx_[p], j) = vals_[p];
  return d;
}

bool SparseMatrix::check_symmetric(double tol) const {
  if (n_rows_ != n_cols_) return false;
  for (Index j = 0; j < n_cols_; ++j) {
    for (Index p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) {
      if (std::abs(vals_[p] - coeff(j, row_idx_[p])) > tol) return false;
    }
  }
  return true;
}

double SparseMatrix::coeff(Index i, Index j) const {
  const Index* begin = row_idx_.data() + col_ptr_[j];
  const Index* end = row_idx_.data() + col_ptr_[j + 1];
  const Index* it = std::lower_bound(begin, end, i);
  if (it != end && *it == i) return vals_[col_ptr_[j] + (it - begin)];
  return 0.0;
}

Vector SparseMatrix::diagonal() const {
  const Index n = std::min(n_rows_, n_cols_);
  Vector d = Vector::Zero(n);
  for (Index j = 0; j < n; ++j) d[j] = coeff(j, j);
  return d;
}

Vector matvec(const SparseMatrix& a, const Vector& x) {
  if (a.cols() != x.size())
    throw std::invalid_argument("matvec: dimension mismatch, matrix is " +
                                dims(a.rows(), a.cols()) + ", vector has " +
                                std::to_string(x.size()) + " entries");
  Vector y = Vector::Zero(a.rows());
  for (Index j = 0; j < a.cols(); ++j) {
    const double xj = x[j];
    if (xj == 0.0) continue;
    auto rows = a.col_rows(j);
    auto vals = a.col_vals(j);
    for (std::size_t p = 0; p < rows.size(); ++p) y[rows[p]] += vals[p] * xj;
  }
  return y;
}

double frobenius_diff(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("frobenius_diff: dimension mismatch " +
                                dims(a.rows(), a.cols()) + " vs " +
                                dims(b.rows(), b.cols()));
  double sum = 0.0;
  for (Index j = 0; j < a.cols(); ++j) {
    auto ra = a.col_rows(j);
    auto va = a.col_vals(j);
    auto rb = b.col_rows(j);
    auto vb = b.col_vals(j);
    std::size_t pa = 0, pb = 0;
    // Two-pointer merge over the sorted patterns.
    while (pa < ra.size() || pb < rb.size()) {
      double d;
      if (pb == rb.size() || (pa < ra.size() && ra[pa] < rb[pb])) {
        d = va[pa++];
      } else if (pa == ra.size() || rb[pb] < ra[pa]) {
        d = -vb[pb++];
      } else {
        d = va[pa++] - vb[pb++];
      }
      sum += d * d;
    }
  }
  return std::sqrt(sum);
}

SparseMatrix add_scaled(const SparseMatrix& a, const SparseMatrix& b,
                        double scale) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("add_scaled: dimension mismatch");
  std::vector<Index> col_ptr(a.cols() + 1, 0);
  std::vector<Index> row_idx;
  std::vector<double> vals;
  row_idx.reserve(a.nnz() + b.nnz());
  vals.reserve(a.nnz() + b.nnz());
  for (Index j = 0; j < a.cols(); ++j) {
    auto ra = a.col_rows(j);
    auto va = a.col_vals(j);
    auto rb = b.col_rows(j);
    auto vb = b.col_vals(j);
    std::size_t pa = 0, pb = 0;
    while (pa < ra.size() || pb < rb.size()) {
      if (pb == rb.size() || (pa < ra.size() && ra[pa] < rb[pb])) {
        row_idx.push_back(ra[pa]);
        vals.push_back(va[pa]);
        ++pa;
      } else if (pa == ra.size() || rb[pb] < ra[pa]) {
        row_idx.push_back(rb[pb]);
        vals.push_back(scale * vb[pb]);
        ++pb;
      } else {
        row_idx.push_back(ra[pa]);
        vals.push_back(va[pa] + scale * vb[pb]);
        ++pa;
        ++pb;
      }
    }
    col_ptr[j + 1] = static_cast<Index>(row_idx.size());
  }
  return SparseMatrix(a.rows(), a.cols(), std::move(col_ptr),
                      std::move(row_idx), std::move(vals),
                      a.symmetric() && b.symmetric());
}

SparseMatrix lower_triangle(const SparseMatrix& a) {
  std::vector<Index> col_ptr(a.cols() + 1, 0);
  std::vector<Index> row_idx;
  std::vector<double> vals;
  for (Index j = 0; j < a.cols(); ++j) {
    auto rows = a.col_rows(j);
    auto v = a.col_vals(j);
    for (std::size_t p = 0; p < rows.size(); ++p) {
      if (rows[p] >= j) {
        row_idx.push_back(rows[p]);
        vals.push_back(v[p]);
      }
    }
    col_ptr[j + 1] = static_cast<Index>(row_idx.size());
  }
  return SparseMatrix(a.rows(), a.cols(), std::move(col_ptr),
                      std::move(row_idx), std::move(vals), false);
}

}  // namespace seqkrylov
