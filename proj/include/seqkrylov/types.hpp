#pragma once

#include <Eigen/Core>

namespace seqkrylov {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace seqkrylov
