#include "bergman/primitive_moment.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <numbers>

#include "bergman/box_ops.hpp"
#include "bergman/errors.hpp"
#include "bergman/quadrature.hpp"

namespace bergman {

namespace {

// rounding allowance for closed-form evaluations
constexpr double kRounding = 1e-13;

template <class... F>
struct overloaded : F... {
  using F::operator()...;
};

double alpha_norm(const MultiIndex& alpha) {
  double s = 0.0;
  for (std::size_t j = 0; j < alpha.size(); ++j) s += 4.0 * (alpha[j] + 1) * (alpha[j] + 1);
  return std::sqrt(s);
}

// log of the Gauss-Legendre error factor (b-a)^{2K+1} (K!)^4 / ((2K+1) ((2K)!)^3)
double log_gauss_legendre_factor(int k, double width) {
  return (2.0 * k + 1.0) * std::log(width) + 4.0 * std::lgamma(k + 1.0) -
         std::log(2.0 * k + 1.0) - 3.0 * std::lgamma(2.0 * k + 1.0);
}

}  // namespace

CertifiedMoment CertifiedMoment::zero(std::size_t size) {
  return {MomentVector::Zero(size), MomentVector::Zero(size)};
}

CertifiedMoment& CertifiedMoment::operator+=(const CertifiedMoment& other) {
  value += other.value;
  error += other.error;
  return *this;
}

CertifiedMoment box_moment_certified(const AxisBox& b, const IndexSet& idx) {
  CertifiedMoment out{box_moment(idx, b), MomentVector()};
  out.error = kRounding * out.value;
  return out;
}

double log_sphere_exp_integral(int n, double z) {
  if (n < 2) throw ValidationError("sphere integral needs n >= 2");
  if (z < 0.0) throw ValidationError("negative argument");
  const double nu = n / 2.0 - 1.0;
  const double log_pref = (n / 2.0) * std::log(2.0 * std::numbers::pi);
  if (z == 0.0)  // surface area of the unit sphere
    return std::log(2.0) + (n / 2.0) * std::log(std::numbers::pi) - std::lgamma(n / 2.0);
  if (n == 3)
    return std::log(2.0 * std::numbers::pi) + z + std::log1p(-std::exp(-2.0 * z)) - std::log(z);
  if (z > 700.0) throw OverflowError("sphere integral argument too large");
  return log_pref + std::log(boost::math::cyl_bessel_i(nu, z)) - nu * std::log(z);
}

CertifiedMoment shell_moment(const SphericalShell& s, const IndexSet& idx, double budget, int shell_order) {
  const int n = idx.n();
  if (s.n != n) throw ValidationError("shell dimension does not match n");
  // slightly widened radii for the derivative bound
  const double r1 = to_double(s.inner_radius()) * (1.0 - 1e-15);
  const double r2 = to_double(s.outer_radius()) * (1.0 + 1e-15);
  const double w = s.width;
  if (!(w > 0.0) || !(r1 > 0.0)) throw ValidationError("shell needs 0 < r1 < r2");
  const double entry_budget = budget / std::sqrt(static_cast<double>(idx.size()));

  CertifiedMoment out = CertifiedMoment::zero(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const double z = alpha_norm(idx[i]);
    const double log_rate = std::log(z + (n - 1) / r1);
    // |f^{(2K)}| <= r2^{n-1} (z + (n-1)/r1)^{2K} Phi(r2 z) for f(r) = r^{n-1} Phi(r z)
    const double log_top = (n - 1) * std::log(r2) + log_sphere_exp_integral(n, r2 * z);
    const double rounding_rel = kRounding + (z + (n - 1) / r1) * 4e-16 * r2;
    bool done = false;
    for (int k : {4, 6, 8, 12, 16, 24, 32, 48, 64}) {
      if (k < shell_order && k != 64) continue;
      const double log_err = log_gauss_legendre_factor(k, w) + log_top + 2.0 * k * log_rate;
      const double quad_err = std::exp(log_err);
      const auto rule = gauss_jacobi01(k, 0.0, 0.0);
      double sum = 0.0;
      for (int q = 0; q < k; ++q) {
        const double r = s.r_mid + w * (rule.nodes[q] - 0.5);
        sum += rule.weights[q] *
               std::exp((n - 1) * std::log(r) + log_sphere_exp_integral(n, r * z));
      }
      const double value = w * sum;
      const double err = quad_err + rounding_rel * value;
      out.value[i] = value;
      out.error[i] = err;
      if (err <= entry_budget || k == 64) {
        done = err <= entry_budget || budget == kNoBudget;
        break;
      }
    }
    if (!done) throw BudgetExceeded("shell quadrature error exceeds its budget");
  }
  if (out.error_norm() > budget) throw BudgetExceeded("shell quadrature error exceeds its budget");
  return out;
}

double tail_section_volume(int n) {
  if (n < 2) throw ValidationError("tail section needs n >= 2");
  // sum of k uniforms on (-1,1) is 2H - k with H Irwin-Hall on [0,k]
  const int k = n - 1;
  auto cdf = [k](double x) {
    double s = 0.0;
    for (int j = 0; j <= static_cast<int>(std::floor(x)) && j <= k; ++j)
      s += ((j % 2) ? -1.0 : 1.0) * binomial(k, j) * std::pow(x - j, k);
    return s / factorial(k);
  };
  return std::pow(2.0, k) * (cdf((k + 1) / 2.0) - cdf((k - 1) / 2.0));
}

TailBracket tail_bracket(const MultiIndex& alpha, int m, const TailRegion& t) {
  if (!alpha.nonnegative() || alpha.degree() > m)
    throw ValidationError("tail moments exist only for |alpha| <= m");
  const int n = t.n;
  const double nv0 = n * tail_section_volume(n);
  const double b = 2.0 * (alpha.degree() + n);
  const double kappa = 2.0 * (m + 1 - alpha.degree());
  const double integral = std::exp(-kappa * t.R) / kappa;
  return {std::exp(-b) * nv0, std::exp(b) * nv0, std::exp(-b) * nv0 * integral,
          std::exp(b) * nv0 * integral};
}

CertifiedMoment tail_moment(const TailRegion& t, const IndexSet& idx) {
  const int m = idx.m(), n = idx.n();
  if (t.n != n) throw ValidationError("tail dimension does not match n");
  if (t.gamma != tail_gamma(m, n)) throw ValidationError("tail decay rate does not match (m, n)");
  // In coordinates x = t(1,..,1) + e^{-gamma t} y(u), u in E0, the volume
  // element is n e^{-(n-1) gamma t} dt du and v_alpha = e^{2(|a|+n)t} e^{<k,y>},
  // |<k,y>| < b e^{-gamma t}. The symmetric average of e^{<k,y>} over E0
  // lies in [1, cosh(b e^{-gamma R})].
  const double nv0 = n * tail_section_volume(n);
  const double omega = std::exp(-t.gamma * t.R);
  CertifiedMoment out = CertifiedMoment::zero(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const double deg = idx[i].degree();
    const double kappa = 2.0 * (m + 1 - deg);
    const double lower = nv0 * std::exp(-kappa * t.R) / kappa;
    const double spread = std::cosh(2.0 * (deg + n) * omega) - 1.0;
    out.value[i] = lower * (1.0 + spread / 2.0);
    out.error[i] = lower * spread / 2.0 + kRounding * out.value[i];
  }
  return out;
}

CertifiedMoment simplex_shell_moment(const LogSimplexShell& t, const IndexSet& idx) {
  const int n = idx.n();
  if (t.n != n) throw ValidationError("simplex shell dimension does not match n");
  // y_j = e^{2 x_j} maps the shell onto {mu c s0 < sum y < c s0} with
  // dx = 2^{-n} dy / prod y; Dirichlet integrals give the closed form
  const double top = t.c * t.s0;
  CertifiedMoment out = CertifiedMoment::zero(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const int p = idx[i].degree() + n;
    const double log_val = -n * std::log(2.0) + std::log(idx[i].factorial()) - std::lgamma(p + 1.0) +
                           p * std::log(top) + std::log1p(-std::pow(t.mu, p));
    out.value[i] = std::exp(log_val);
    out.error[i] = kRounding * out.value[i];
  }
  return out;
}

CertifiedMoment corridor_moment(const BoxChainCorridor& c, const IndexSet& idx) {
  CertifiedMoment out = CertifiedMoment::zero(idx.size());
  for (const auto& b : disjointify(c.segments)) out += box_moment_certified(b, idx);
  return out;
}

CertifiedMoment primitive_moment(const Primitive& p, const IndexSet& idx, double budget, int shell_order) {
  CertifiedMoment out = std::visit(
      overloaded{
          [&](const AxisBox& b) { return box_moment_certified(b, idx); },
          [&](const SphericalShell& s) { return shell_moment(s, idx, budget, shell_order); },
          [&](const TailRegion& t) { return tail_moment(t, idx); },
          [&](const LogSimplexShell& t) { return simplex_shell_moment(t, idx); },
          [&](const BoxChainCorridor& c) { return corridor_moment(c, idx); },
      },
      p);
  if (out.error_norm() > budget)
    throw BudgetExceeded(kind_name(p) + " moment error exceeds its budget");
  return out;
}

}  // namespace bergman
