#pragma once

#include <Eigen/Dense>

namespace epi {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace epi
