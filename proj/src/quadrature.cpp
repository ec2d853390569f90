#include "bergman/quadrature.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "bergman/errors.hpp"

namespace bergman {

QuadratureRule gauss_jacobi01(int k, double a, double b) {
  if (k < 1) throw ValidationError("quadrature order must be >= 1");
  // Jacobi weight (1-x)^a (1+x)^b on [-1,1]; monic recurrence coefficients
  Eigen::VectorXd diag(k), off(std::max(k - 1, 0));
  for (int i = 0; i < k; ++i) {
    const double s = 2.0 * i + a + b;
    diag[i] = (i == 0) ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (s * (s + 2.0));
  }
  for (int i = 1; i < k; ++i) {
    const double s = 2.0 * i + a + b;
    double beta;
    if (i == 1)
      beta = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b) * (2.0 + a + b) * (3.0 + a + b));
    else
      beta = 4.0 * i * (i + a) * (i + b) * (i + a + b) / (s * s * (s + 1.0) * (s - 1.0));
    off[i - 1] = std::sqrt(beta);
  }
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) jac(i, i) = diag[i];
  for (int i = 0; i + 1 < k; ++i) jac(i, i + 1) = jac(i + 1, i) = off[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jac);
  // total mass of (1-x)^a x^b on [0,1]
  const double mass = std::exp(std::lgamma(a + 1.0) + std::lgamma(b + 1.0) - std::lgamma(a + b + 2.0));
  QuadratureRule rule;
  for (int i = 0; i < k; ++i) {
    const double v0 = eig.eigenvectors()(0, i);
    rule.nodes.push_back((1.0 + eig.eigenvalues()[i]) / 2.0);
    rule.weights.push_back(mass * v0 * v0);
  }
  return rule;
}

}  // namespace bergman
