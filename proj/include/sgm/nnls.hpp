#pragma once

#include <Eigen/Core>

namespace sgm {

/// Nonnegative least squares: argmin_{x ≥ 0} ‖A x − b‖₂ (Lawson–Hanson active set).
Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iterations = 0);

}  // namespace sgm
