#pragma once

#include <vector>

#include "seqkrylov/operators.hpp"
#include "seqkrylov/sparse.hpp"

namespace seqkrylov {

enum class PatternStrategy {
  PatternOfA,  // sparsity of A union the diagonal
  Diagonal,
  Threshold,  // |a_ij| >= tau * max|a_.j| per column, union the diagonal
};

/// Per-column sorted row-index sets prescribing where the map may have
/// nonzeros. Construction keeps at least the diagonal in every column.
struct SparsityPattern {
  Index n = 0;
  std::vector<std::vector<Index>> cols;

  Index nnz() const;
  void validate() const;
};

/// Throws std::invalid_argument when strategy is Threshold and tau is
/// outside (0, 1].
SparsityPattern build_pattern(const SparseMatrix& a, PatternStrategy strategy,
                              double tau = 0.0);

/// The sparse approximate map N minimizing ||A_k N - A_0||_F over the
/// pattern, with the attained residual and per-column residual norms.
struct SamMap {
  SparseMatrix n_map;
  double residual_fro = 0.0;
  SparsityPattern pattern;
  std::vector<double> column_residuals;
  std::vector<Index> rank_deficient_columns;  // minimum-norm solution taken
  std::vector<Index> empty_columns;           // produced a zero column
};

/// Solves the n independent small least-squares problems, one per column:
/// G = A_k[I_j, S_j], rhs = A_0[I_j, j], where I_j is the union of the row
/// supports of the selected columns and of the target column. Columns are
/// independent, so the loop runs in parallel over `threads` workers
/// (0 = hardware concurrency, 1 = sequential) with bitwise-identical output
/// either way.
SamMap compute_sam(const SparseMatrix& a_k, const SparseMatrix& a_0,
                   const SparsityPattern& pattern, int threads = 0);

/// Composed preconditioner P_k with apply_inverse(v) = N * P0.apply_inverse(v).
Preconditioner sam_precondition(const SamMap& map, const Preconditioner& p0);

}  // namespace seqkrylov
