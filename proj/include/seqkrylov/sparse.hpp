#pragma once

#include <span>
#include <vector>

#include "seqkrylov/types.hpp"

namespace seqkrylov {

struct Triplet {
  Index row;
  Index col;
  double value;
};

/// Square-or-rectangular sparse matrix in compressed sparse-column storage.
/// Row indices are strictly increasing within each column; duplicate entries
/// are summed on ingestion. The `symmetric` flag is a declared property,
/// validated on demand rather than enforced structurally.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  /// Takes ownership of raw CSC arrays. Throws std::invalid_argument if the
  /// arrays are inconsistent (non-monotone col_ptr, unsorted or out-of-range
  /// row indices, size mismatches).
  SparseMatrix(Index n_rows, Index n_cols, std::vector<Index> col_ptr,
               std::vector<Index> row_idx, std::vector<double> vals,
               bool symmetric = false);

  static SparseMatrix from_triplets(Index n_rows, Index n_cols,
                                    std::span<const Triplet> entries,
                                    bool symmetric = false);

  static SparseMatrix identity(Index n);

  /// Compresses a dense matrix, dropping entries with |a_ij| <= drop_tol.
  static SparseMatrix from_dense(const Matrix& dense, double drop_tol = 0.0,
                                 bool symmetric = false);

  Matrix to_dense() const;

  Index rows() const { return n_rows_; }
  Index cols() const { return n_cols_; }
  Index nnz() const { return static_cast<Index>(vals_.size()); }

  bool symmetric() const { return symmetric_; }
  void set_symmetric(bool s) { symmetric_ = s; }

  /// Checks the declared symmetry: every stored (i,j,v) has a matching (j,i)
  /// entry within absolute tolerance `tol` (a missing mirror counts as zero).
  bool check_symmetric(double tol = 1e-12) const;

  std::span<const Index> col_rows(Index j) const {
    return {row_idx_.data() + col_ptr_[j],
            static_cast<std::size_t>(col_ptr_[j + 1] - col_ptr_[j])};
  }
  std::span<const double> col_vals(Index j) const {
    return {vals_.data() + col_ptr_[j],
            static_cast<std::size_t>(col_ptr_[j + 1] - col_ptr_[j])};
  }

  /// Value at (i, j); zero when not stored. Binary search within the column.
  double coeff(Index i, Index j) const;

  Vector diagonal() const;

  const std::vector<Index>& col_ptr() const { return col_ptr_; }
  const std::vector<Index>& row_idx() const { return row_idx_; }
  const std::vector<double>& values() const { return vals_; }

 private:
  Index n_rows_ = 0;
  Index n_cols_ = 0;
  std::vector<Index> col_ptr_{0};
  std::vector<Index> row_idx_;
  std::vector<double> vals_;
  bool symmetric_ = false;
};

/// y = A x. Throws std::invalid_argument on dimension mismatch, naming both
/// dimensions.
Vector matvec(const SparseMatrix& a, const Vector& x);

/// ||A - B||_F computed over the merged sparsity patterns, no densification.
double frobenius_diff(const SparseMatrix& a, const SparseMatrix& b);

/// A + scale * B with pattern merging.
SparseMatrix add_scaled(const SparseMatrix& a, const SparseMatrix& b,
                        double scale);

/// Lower triangle of A including the diagonal.
SparseMatrix lower_triangle(const SparseMatrix& a);

}  // namespace seqkrylov
