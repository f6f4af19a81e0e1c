#include "seqkrylov/linalg.hpp"

namespace seqkrylov {

QrResult orthonormalize(const Matrix& v, double rank_tol) {
  const Index n = v.rows();
  const Index cols = v.cols();
  const double drop = rank_tol * v.norm();  // Frobenius scale of the input

  Matrix q(n, cols);
  Matrix r = Matrix::Zero(cols, cols);
  std::vector<Index> dropped;
  Index kept = 0;

  for (Index j = 0; j < cols; ++j) {
    Vector w = v.col(j);
    for (Index i = 0; i < kept; ++i) {
      const double c = q.col(i).dot(w);
      w -= c * q.col(i);
      r(i, j) = c;
    }
    // Second pass picks up what cancellation left behind.
    for (Index i = 0; i < kept; ++i) {
      const double c = q.col(i).dot(w);
      w -= c * q.col(i);
      r(i, j) += c;
    }
    const double nrm = w.norm();
    if (nrm <= drop) {
      dropped.push_back(j);
      continue;
    }
    q.col(kept) = w / nrm;
    r(kept, j) = nrm;
    ++kept;
  }

  QrResult out;
  out.q = q.leftCols(kept);
  out.r = r.topRows(kept);
  out.dropped = std::move(dropped);
  return out;
}

}  // namespace seqkrylov
