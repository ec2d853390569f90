#pragma once

#include <Eigen/Dense>

namespace bergman {

struct NnlsResult {
  Eigen::VectorXd x;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Lawson-Hanson active-set solver for min ||Ax - b|| subject to x >= 0.
// Ties in the entering column are broken towards the larger column norm.
NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iter = 0);

}  // namespace bergman
