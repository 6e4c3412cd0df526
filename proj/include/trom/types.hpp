#pragma once

#include <Eigen/Dense>

namespace trom {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace trom
