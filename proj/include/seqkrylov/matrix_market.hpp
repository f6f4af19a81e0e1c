#pragma once

#include <stdexcept>
#include <string>

#include "seqkrylov/sparse.hpp"
#include "seqkrylov/types.hpp"

namespace seqkrylov {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Reads a Matrix Market coordinate file (real, general or symmetric).
/// Symmetric-stored files are expanded to full storage with the symmetric
/// flag set; indices are converted to 0-based; duplicates are summed.
/// Malformed input throws ParseError naming the file and line.
SparseMatrix load_matrix_market(const std::string& path);

/// Writes coordinate format with 17 significant digits. Symmetric-flagged
/// matrices are stored as their lower triangle under the symmetric qualifier.
void save_matrix_market(const std::string& path, const SparseMatrix& a);

/// Reads a dense vector from Matrix Market array format (n x 1).
Vector load_vector(const std::string& path);

void save_vector(const std::string& path, const Vector& v);

}  // namespace seqkrylov
