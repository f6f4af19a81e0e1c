#include "seqkrylov/rng.hpp"

#include <cmath>

namespace seqkrylov {

double Rng::normal() {
  // Box-Muller on the raw uniform stream; spare value cached.
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  double u2 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double mag = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * M_PI * u2;
  spare_ = mag * std::sin(ang);
  has_spare_ = true;
  return mag * std::cos(ang);
}

Vector Rng::normal_vector(Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal();
  return v;
}

Vector Rng::unit_vector(Index n) {
  Vector v = normal_vector(n);
  double nrm = v.norm();
  while (nrm == 0.0) {
    v = normal_vector(n);
    nrm = v.norm();
  }
  return v / nrm;
}

}  // namespace seqkrylov
