#pragma once

#include <vector>

namespace bergman {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Jacobi rule on [0,1] for the weight (1-x)^a x^b (Golub-Welsch).
// a = b = 0 gives Gauss-Legendre.
QuadratureRule gauss_jacobi01(int k, double a, double b);

}  // namespace bergman
