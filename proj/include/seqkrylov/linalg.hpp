#pragma once

#include <vector>

#include "seqkrylov/types.hpp"

namespace seqkrylov {

struct QrResult {
  Matrix q;  // n x k, orthonormal columns (k = kept columns)
  Matrix r;  // k x cols(V), upper staircase; QR = V within tolerance
  std::vector<Index> dropped;  // input columns below the rank tolerance
};

/// Modified Gram-Schmidt with one reorthogonalization pass. Columns whose
/// remainder falls below rank_tol * ||V||_F are dropped and reported, never
/// an error.
QrResult orthonormalize(const Matrix& v, double rank_tol = 1e-12);

}  // namespace seqkrylov
