#pragma once

#include <Eigen/Dense>

namespace polycrit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

}  // namespace polycrit
