#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "bergman/density_quadrature.hpp"
#include "bergman/errors.hpp"
#include "bergman/moments.hpp"
#include "bergman/random.hpp"

using namespace bergman;

namespace {

constexpr double kPi = std::numbers::pi;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Direct integral of rho(x) v_alpha(x) over R^2 without the radial/simplex
// split: nested Gauss-Kronrod on the whole plane.
double direct_density_moment_2d(int m, const MultiIndex& alpha) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double inf = std::numeric_limits<double>::infinity();
  auto inner = [&](double x1) {
    auto f = [&](double x2) {
      const double lin = 2.0 * ((alpha[0] + 1) * x1 + (alpha[1] + 1) * x2);
      const double big = std::max({0.0, 2.0 * x1, 2.0 * x2});
      const double log_s = big + std::log(std::exp(-big) + std::exp(2.0 * x1 - big) + std::exp(2.0 * x2 - big));
      const double norm = std::tgamma(m + 3.0) / (kPi * kPi * std::tgamma(m + 1.0));
      return norm * std::exp(lin - (m + 3.0) * log_s);
    };
    return GK::integrate(f, -inf, inf, 15, 1e-13);
  };
  return GK::integrate(inner, -inf, inf, 15, 1e-12);
}

}  // namespace

TEST_CASE("index enumeration is graded lexicographic") {
  auto I = enumerate_multi_indices(1, 2);
  REQUIRE(I.size() == 3);
  CHECK(I[0].entries() == std::vector<int>{0, 0});
  CHECK(I[1].entries() == std::vector<int>{1, 0});
  CHECK(I[2].entries() == std::vector<int>{0, 1});

  auto J = enumerate_multi_indices(0, 5);
  REQUIRE(J.size() == 1);
  CHECK(J[0].degree() == 0);

  CHECK_THROWS_AS(enumerate_multi_indices(1, 0), std::invalid_argument);
}

TEST_CASE("index set sizes match brute force counting") {
  for (int n = 1; n <= 4; ++n) {
    for (int m = 0; m <= 5; ++m) {
      // brute force: count tuples in [0,m]^n with sum <= m
      long count = 0;
      std::vector<int> t(n, 0);
      for (;;) {
        int s = 0;
        for (int v : t) s += v;
        if (s <= m) ++count;
        int j = 0;
        while (j < n && ++t[j] > m) t[j++] = 0;
        if (j == n) break;
      }
      IndexSet idx(m, n);
      CHECK(static_cast<long>(idx.size()) == count);
      CHECK(idx.size() == static_cast<std::size_t>(binomial(m + n, n)));
      for (std::size_t k = 1; k < idx.size(); ++k) CHECK(idx[k - 1].degree() <= idx[k].degree());
      for (std::size_t k = 0; k < idx.size(); ++k) CHECK(idx.position(idx[k]) == k);
    }
  }
  CHECK(IndexSet(2, 2).size() == 6);
}

TEST_CASE("target moments") {
  IndexSet i12(1, 2);
  auto a = target_moment_vector(i12);
  for (int k = 0; k < 3; ++k) CHECK(a[k] == doctest::Approx(1.0 / (4 * kPi * kPi)).epsilon(1e-15));
  CHECK(a[0] == doctest::Approx(0.0253303).epsilon(1e-6));

  IndexSet i22(2, 2);
  auto b = target_moment_vector(i22);
  CHECK(b[*i22.position(MultiIndex({1, 0}))] ==
        doctest::Approx(1.0 / (8 * kPi * kPi)).epsilon(1e-15));

  for (int n = 2; n <= 4; ++n)
    for (int m = 1; m <= 3; ++m) {
      auto t = target_moment_vector(IndexSet(m, n));
      CHECK(t[0] == doctest::Approx(std::pow(2 * kPi, -n)).epsilon(1e-15));
      CHECK(t.minCoeff() > 0.0);
    }
  CHECK_THROWS_AS(target_moment_vector(IndexSet(1, 1)), ValidationError);
}

TEST_CASE("exponential moment vector") {
  IndexSet idx(1, 2);
  const double zero[2] = {0.0, 0.0};
  auto v0 = exp_moment_vector(idx, zero);
  for (int k = 0; k < 3; ++k) CHECK(v0[k] == 1.0);

  const double x[2] = {std::log(2.0) / 2, 0.0};
  auto v = exp_moment_vector(idx, x);
  CHECK(v[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(v[1] == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(v[2] == doctest::Approx(2.0).epsilon(1e-15));

  const double far[2] = {1e4, 1e4};
  auto lv = log_exp_moment_vector(idx, far);
  for (int k = 0; k < 3; ++k) CHECK(std::isfinite(lv.log_values[k]));
  CHECK_THROWS_AS(exp_moment_vector(idx, far), OverflowError);

  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const double y[2] = {rng.uniform(-5, 5), rng.uniform(-5, 5)};
    auto p = exp_moment_vector(idx, y);
    auto l = log_exp_moment_vector(idx, y);
    for (int k = 0; k < 3; ++k) CHECK(rel(std::exp(l.log_values[k]), p[k]) <= 1e-12);
  }
}

TEST_CASE("density rho") {
  const double x0[2] = {0.0, 0.0};
  CHECK(density_rho(1, 2, x0) == doctest::Approx(6.0 / (81.0 * kPi * kPi)).epsilon(1e-14));
  CHECK(density_rho(1, 2, x0) == doctest::Approx(0.0075056).epsilon(1e-5));
  const double xneg[2] = {-40.0, -40.0};
  CHECK(density_rho(1, 2, xneg) == doctest::Approx(6.0 / (kPi * kPi)).epsilon(1e-14));
  const double xpos[2] = {50.0, 0.0};
  CHECK(density_rho(1, 2, xpos) < 1e-100);
  CHECK(density_rho(1, 2, xpos) > 0.0);
}

TEST_CASE("density integral against v_0 equals A_0 (direct quadrature)") {
  for (int m : {1, 2}) {
    const double got = direct_density_moment_2d(m, MultiIndex({0, 0}));
    CHECK(rel(got, 1.0 / (4 * kPi * kPi)) <= 1e-8);
  }
}

TEST_CASE("box moments") {
  IndexSet idx(1, 2);
  const double lo[2] = {0.0, 0.0};
  const double hi[2] = {std::log(2.0) / 2, std::log(2.0) / 2};
  auto b = box_moment(idx, lo, hi);
  CHECK(b[0] == doctest::Approx(0.25).epsilon(1e-15));
  // alpha = (1,0): (e^{4 ln2/2} - 1)/4 = 3/4 times 1/2
  CHECK(b[1] == doctest::Approx(0.375).epsilon(1e-15));

  const double deg_hi[2] = {0.0, 1.0};
  auto z = box_moment(idx, lo, deg_hi);
  CHECK(z.norm() == 0.0);

  const double bad[2] = {-1.0, 1.0};
  CHECK_THROWS_AS(box_moment(idx, lo, bad), ValidationError);
}

TEST_CASE("box moments are additive under bisection") {
  IndexSet idx(2, 3);
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> lo(3), hi(3);
    for (int j = 0; j < 3; ++j) {
      lo[j] = rng.uniform(-2, 1);
      hi[j] = lo[j] + rng.uniform(0.01, 1.5);
    }
    const int axis = trial % 3;
    const double mid = lo[axis] + rng.uniform() * (hi[axis] - lo[axis]);
    auto left_hi = hi;
    left_hi[axis] = mid;
    auto right_lo = lo;
    right_lo[axis] = mid;
    auto whole = box_moment(idx, lo, hi);
    MomentVector parts = box_moment(idx, lo, left_hi) + box_moment(idx, right_lo, hi);
    for (Eigen::Index k = 0; k < whole.size(); ++k) CHECK(rel(parts[k], whole[k]) <= 1e-13);
  }
}

TEST_CASE("box moments agree with Monte Carlo") {
  IndexSet idx(2, 3);
  const double lo[3] = {-0.7, -1.0, 0.1};
  const double hi[3] = {0.4, -0.2, 0.9};
  double vol = 1.0;
  for (int j = 0; j < 3; ++j) vol *= hi[j] - lo[j];
  auto exact = box_moment(idx, lo, hi);
  Rng rng(2024);
  const int samples = 1000000;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(idx.size()), sum2 = sum;
  for (int s = 0; s < samples; ++s) {
    double x[3];
    for (int j = 0; j < 3; ++j) x[j] = rng.uniform(lo[j], hi[j]);
    auto v = exp_moment_vector(idx, x);
    sum += v;
    sum2 += v.cwiseProduct(v);
  }
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const double mean = sum[k] / samples;
    const double var = sum2[k] / samples - mean * mean;
    const double se = std::sqrt(var / samples) * vol;
    CHECK(std::abs(mean * vol - exact[k]) <= 3.0 * se);
  }
}

TEST_CASE("log-space box moments far from the origin") {
  IndexSet idx(3, 2);
  const double lo[2] = {300.0, 300.0};
  const double hi[2] = {300.25, 300.5};
  auto l = log_box_moment(idx, lo, hi);
  for (Eigen::Index k = 0; k < l.log_values.size(); ++k) CHECK(std::isfinite(l.log_values[k]));
  // alpha = 0: each axis gives e^{600}(e^{2w}-1)/2
  const double expect = 1200.0 + std::log(std::expm1(0.5) / 2) + std::log(std::expm1(1.0) / 2);
  CHECK(rel(l.log_values[0], expect) <= 1e-14);

  // thin interval whose width is not representable next to its endpoint
  const double thin = log_exp_integral(2.0, 300.0, 1e-20, 1e-30);
  CHECK(rel(thin, std::log(1e-30) + 600.0 + 2e-20) <= 1e-15);

  const double lo2[2] = {-0.3, 0.2};
  const double hi2[2] = {0.1, 0.9};
  auto plain = box_moment(idx, lo2, hi2);
  auto logv = log_box_moment(idx, lo2, hi2);
  for (Eigen::Index k = 0; k < plain.size(); ++k) CHECK(rel(std::exp(logv.log_values[k]), plain[k]) <= 1e-12);
}

TEST_CASE("multinomial identity") {
  Rng rng(5);
  for (int n = 2; n <= 4; ++n) {
    for (int m = 1; m <= 4; ++m) {
      IndexSet idx(m, n);
      for (int trial = 0; trial < 40; ++trial) {
        std::vector<std::complex<double>> z(n);
        double norm2 = 0.0;
        for (auto& zj : z) {
          zj = {rng.uniform(-2, 2), rng.uniform(-2, 2)};
          norm2 += std::norm(zj);
        }
        double sum = 0.0;
        for (const auto& alpha : idx) {
          double mod2 = 1.0;
          for (int j = 0; j < n; ++j) mod2 *= std::pow(std::norm(z[j]), alpha[j]);
          sum += factorial(m) / (alpha.factorial() * factorial(m - alpha.degree())) * mod2;
        }
        CHECK(rel(sum, std::pow(1.0 + norm2, m)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("radial and simplex integrals match Beta closed forms") {
  for (int n = 2; n <= 4; ++n) {
    for (int m = 1; m <= 4; ++m) {
      for (int d = 0; d <= m; ++d) {
        const double beta = factorial(d + n - 1) * factorial(m - d) / factorial(m + n);
        CHECK(rel(radial_beta_integral(d, m, n), beta) <= 1e-8);
      }
      for (const auto& alpha : IndexSet(m, n)) {
        const double closed = alpha.factorial() / factorial(alpha.degree() + n - 1);
        CHECK(rel(simplex_monomial_integral(alpha), closed) <= 1e-8);
      }
    }
  }
}

TEST_CASE("density quadrature reproduces the target moments") {
  for (auto [m, n] : {std::pair{1, 2}, {2, 2}, {1, 3}, {3, 2}}) {
    IndexSet idx(m, n);
    auto q = density_moment_quadrature(idx);
    auto a = target_moment_vector(idx);
    for (std::size_t k = 0; k < idx.size(); ++k) CHECK(rel(q.value[k], a[k]) <= 1e-6);
  }
}
