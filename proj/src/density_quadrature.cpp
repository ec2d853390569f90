#include "bergman/density_quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>

namespace bergman {

double radial_beta_integral(int d, int m, int n, double* err) {
  const double p = d + n - 1.0;
  const double q = m + n + 1.0;
  auto f = [p, q](double s) { return std::exp(p * std::log(s) - q * std::log1p(s)); };
  double e = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, 0.0, std::numeric_limits<double>::infinity(), 20, 1e-15, &e);
  if (err) *err = e;
  return v;
}

namespace {

using Rule = boost::math::quadrature::gauss<double, 30>;

double simplex_rec(const std::vector<int>& a, std::size_t pos, double mass) {
  if (pos + 1 == a.size()) return std::pow(mass, a[pos]);
  auto f = [&](double u) { return std::pow(u, a[pos]) * simplex_rec(a, pos + 1, mass - u); };
  return Rule::integrate(f, 0.0, mass);
}

}  // namespace

double simplex_monomial_integral(const MultiIndex& alpha) {
  return simplex_rec(alpha.entries(), 0, 1.0);
}

DensityMoments density_moment_quadrature(const IndexSet& idx) {
  const int m = idx.m();
  const int n = idx.n();
  const double norm = std::exp(std::lgamma(m + n + 1.0) - std::lgamma(m + 1.0)) /
                      std::pow(std::numbers::pi, n) * std::pow(2.0, -n);
  DensityMoments out{MomentVector(idx.size()), 0.0};
  for (std::size_t k = 0; k < idx.size(); ++k) {
    double err = 0.0;
    const double radial = radial_beta_integral(idx[k].degree(), m, n, &err);
    const double simplex = simplex_monomial_integral(idx[k]);
    out.value[k] = norm * radial * simplex;
    out.max_error_estimate = std::max(out.max_error_estimate, err / radial);
  }
  return out;
}

}  // namespace bergman
