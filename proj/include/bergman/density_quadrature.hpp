#pragma once

#include "bergman/moments.hpp"

namespace bergman {

// Integral of s^{d+n-1} (1+s)^{-(m+n+1)} over (0, inf) by adaptive
// Gauss-Kronrod; error estimate written to *err when given.
double radial_beta_integral(int d, int m, int n, double* err = nullptr);

// Integral of u^alpha over the standard simplex {u >= 0, sum u = 1},
// parametrised by its first n-1 coordinates. Tensor Gauss rule on the
// collapsed coordinates; exact for the polynomial degrees in use.
double simplex_monomial_integral(const MultiIndex& alpha);

struct DensityMoments {
  MomentVector value;
  double max_error_estimate = 0.0;
};

// Quadrature of the moments of the density rho against v over R^n, after
// y = e^{2x} and the radial/simplex split y = s u.
DensityMoments density_moment_quadrature(const IndexSet& idx);

}  // namespace bergman
