#pragma once

#include "seqkrylov/operators.hpp"
#include "seqkrylov/sparse.hpp"

namespace seqkrylov {

/// Diagonal (Jacobi) preconditioner. Throws std::invalid_argument naming the
/// index of any diagonal entry with |a_ii| <= 1e-14.
Preconditioner jacobi_precond(const SparseMatrix& a);

/// Zero-fill incomplete Cholesky factor restricted to the lower-triangular
/// sparsity of A. On a nonpositive pivot the factorization is retried once
/// with diagonal shift 1e-3 * max|a_ii|; a second failure throws.
SparseMatrix ic0_factor(const SparseMatrix& a);

/// Preconditioner wrapping ic0_factor: apply_inverse performs forward then
/// backward substitution with L and L^T.
Preconditioner ic0(const SparseMatrix& a);

/// x = L^{-1} b for lower-triangular L in CSC storage.
Vector lower_solve(const SparseMatrix& l, Vector b);

/// x = L^{-T} b.
Vector lower_transpose_solve(const SparseMatrix& l, Vector b);

}  // namespace seqkrylov
