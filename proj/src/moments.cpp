#include "bergman/moments.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "bergman/errors.hpp"

namespace bergman {

namespace {

constexpr double kMaxLog = 709.0;

double exponent(const MultiIndex& alpha, std::span<const double> x) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) s += (alpha[j] + 1) * x[j];
  return 2.0 * s;
}

void check_dimension(const IndexSet& idx, std::size_t got) {
  if (got != static_cast<std::size_t>(idx.n()))
    throw ValidationError("point dimension does not match n");
}

}  // namespace

MomentVector LogMomentVector::exp() const {
  MomentVector out(log_values.size());
  for (Eigen::Index k = 0; k < log_values.size(); ++k) {
    if (log_values[k] > kMaxLog) throw OverflowError("moment entry exceeds double range");
    out[k] = std::exp(log_values[k]);
  }
  return out;
}

MomentVector target_moment_vector(const IndexSet& idx) {
  if (idx.n() < 2) throw ValidationError("n must be >= 2");
  if (idx.m() < 1) throw ValidationError("m must be >= 1");
  const int m = idx.m();
  const double scale = std::pow(2.0 * std::numbers::pi, -idx.n());
  MomentVector a(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto& alpha = idx[k];
    a[k] = scale * alpha.factorial() * factorial(m - alpha.degree()) / factorial(m);
  }
  return a;
}

LogMomentVector log_exp_moment_vector(const IndexSet& idx, std::span<const double> x) {
  check_dimension(idx, x.size());
  LogMomentVector out{Eigen::VectorXd(idx.size())};
  for (std::size_t k = 0; k < idx.size(); ++k) out.log_values[k] = exponent(idx[k], x);
  return out;
}

MomentVector exp_moment_vector(const IndexSet& idx, std::span<const double> x) {
  return log_exp_moment_vector(idx, x).exp();
}

double density_rho(int m, int n, std::span<const double> x) {
  // computed in log space so that large coordinates decay instead of overflowing
  double big = 0.0;
  for (double xi : x) big = std::max(big, 2.0 * xi);
  double s = std::exp(-big);
  for (double xi : x) s += std::exp(2.0 * xi - big);
  const double log_norm = std::lgamma(m + n + 1.0) - n * std::log(std::numbers::pi) -
                          std::lgamma(m + 1.0);
  return std::exp(log_norm - (m + n + 1.0) * (big + std::log(s)));
}

double log_expm1(double x) {
  if (x > 20.0) return x + std::log1p(-std::exp(-x));
  return std::log(std::expm1(x));
}

double log_exp_integral(double k, double a_hi, double a_lo, double width) {
  if (!(width > 0.0)) return -std::numeric_limits<double>::infinity();
  return k * a_hi + k * a_lo + log_expm1(k * width) - std::log(k);
}

double log_sum_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

LogMomentVector log_box_moment(const IndexSet& idx, std::span<const double> lower,
                               std::span<const double> upper) {
  check_dimension(idx, lower.size());
  check_dimension(idx, upper.size());
  LogMomentVector out{Eigen::VectorXd(idx.size())};
  for (std::size_t k = 0; k < idx.size(); ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < lower.size(); ++j) {
      if (upper[j] < lower[j]) throw ValidationError("box has lower > upper");
      acc += log_exp_integral(2.0 * (idx[k][j] + 1), lower[j], 0.0, upper[j] - lower[j]);
    }
    out.log_values[k] = acc;
  }
  return out;
}

MomentVector box_moment(const IndexSet& idx, std::span<const double> lower,
                        std::span<const double> upper) {
  return log_box_moment(idx, lower, upper).exp();
}

}  // namespace bergman
