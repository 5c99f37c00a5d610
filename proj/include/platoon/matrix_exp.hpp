#pragma once

#include <Eigen/Dense>

namespace platoon {

/// e^{A t} by scaling and squaring with a [13/13] Pade approximant.
/// Intended for the small dense matrices built by the controller.
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& a, double t = 1.0);

}  // namespace platoon
