#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "bergman/decomposition.hpp"
#include "bergman/errors.hpp"
#include "bergman/nnls.hpp"
#include "bergman/random.hpp"

using namespace bergman;

namespace {

// Exhaustive oracle: best least-squares fit over every support set whose
// unconstrained solution is nonnegative.
double brute_force_nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const int cols = static_cast<int>(a.cols());
  double best = b.norm();
  for (int mask = 1; mask < (1 << cols); ++mask) {
    std::vector<int> sel;
    for (int j = 0; j < cols; ++j)
      if (mask & (1 << j)) sel.push_back(j);
    if (static_cast<int>(sel.size()) > a.rows()) continue;
    Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(sel.size()));
    for (std::size_t k = 0; k < sel.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = a.col(sel[k]);
    Eigen::VectorXd x = sub.colPivHouseholderQr().solve(b);
    if (x.minCoeff() < 0.0) continue;
    best = std::min(best, (sub * x - b).norm());
  }
  return best;
}

std::vector<std::vector<double>> grid(double lo, double hi, int k, int n) {
  std::vector<std::vector<double>> out;
  std::vector<int> d(n, 0);
  for (;;) {
    std::vector<double> p(n);
    for (int j = 0; j < n; ++j) p[j] = lo + (hi - lo) * d[j] / (k - 1);
    out.push_back(p);
    int j = 0;
    while (j < n && ++d[j] == k) d[j++] = 0;
    if (j == n) break;
  }
  return out;
}

}  // namespace

TEST_CASE("nnls matches exhaustive support enumeration") {
  Rng rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const int rows = 4 + trial % 4, cols = 3 + trial % 6;
    Eigen::MatrixXd a(rows, cols);
    Eigen::VectorXd b(rows);
    for (int i = 0; i < rows; ++i) {
      b[i] = rng.normal();
      for (int j = 0; j < cols; ++j) a(i, j) = rng.normal();
    }
    auto res = nnls(a, b);
    CHECK(res.converged);
    CHECK(res.x.minCoeff() >= 0.0);
    CHECK(res.residual_norm == doctest::Approx(brute_force_nnls(a, b)).epsilon(1e-9));
    // KKT: gradient nonpositive, zero on the support
    Eigen::VectorXd w = a.transpose() * (b - a * res.x);
    for (int j = 0; j < cols; ++j) {
      CHECK(w[j] <= 1e-9);
      if (res.x[j] > 0) CHECK(std::abs(w[j]) <= 1e-9);
    }
  }
}

TEST_CASE("nnls recovers an exact nonnegative combination") {
  Eigen::MatrixXd a(3, 3);
  a << 1, 0, 1, 0, 1, 1, 0, 0, 1;
  Eigen::VectorXd x(3);
  x << 0.5, 0.0, 2.0;
  auto res = nnls(a, a * x);
  CHECK((res.x - x).norm() <= 1e-14);
  CHECK_THROWS_AS(nnls(a, Eigen::VectorXd::Ones(2)), ValidationError);
}

TEST_CASE("gauss-jacobi rule integrates polynomials against the weight exactly") {
  for (int k : {1, 3, 6}) {
    for (double a : {0.0, 1.0, 2.0}) {
      for (double b : {0.0, 1.0, 2.0}) {
        auto rule = gauss_jacobi01(k, a, b);
        double wsum = 0.0;
        for (double w : rule.weights) {
          CHECK(w > 0.0);
          wsum += w;
        }
        for (int p = 0; p <= 2 * k - 1; ++p) {
          double q = 0.0;
          for (int i = 0; i < k; ++i) q += rule.weights[i] * std::pow(rule.nodes[i], p);
          // Beta(b + p + 1, a + 1)
          const double exact = std::exp(std::lgamma(b + p + 1) + std::lgamma(a + 1) - std::lgamma(a + b + p + 2));
          CHECK(q == doctest::Approx(exact).epsilon(1e-12));
        }
        for (double x : rule.nodes) CHECK((x > 0.0 && x < 1.0));
      }
    }
  }
}

TEST_CASE("density cubature is an exact positive representation of A") {
  for (auto [m, n] : {std::pair{1, 2}, {2, 2}, {1, 3}, {3, 2}, {2, 3}}) {
    IndexSet idx(m, n);
    auto pool = density_cubature(m, n, m + 2);
    CHECK(pool.points.size() == static_cast<std::size_t>(std::pow(m + 2, n)));
    MomentVector sum = MomentVector::Zero(idx.size());
    for (std::size_t i = 0; i < pool.points.size(); ++i) {
      CHECK(pool.cubature_weights[i] > 0.0);
      sum += pool.cubature_weights[i] * exp_moment_vector(idx, pool.points[i]);
    }
    auto a = target_moment_vector(idx);
    for (std::size_t k = 0; k < idx.size(); ++k) CHECK(sum[k] == doctest::Approx(a[k]).epsilon(1e-12));
  }
}

TEST_CASE("density samples follow rho v_0") {
  IndexSet idx(2, 2);
  auto a = target_moment_vector(idx);
  const int count = 400000;
  auto pts = density_samples(2, 2, count, 99);
  REQUIRE(pts.size() == static_cast<std::size_t>(count));
  // E[v_alpha / v_0] = A_alpha / A_0 for |alpha| <= 1 (finite variance)
  for (std::size_t k = 1; k < 3; ++k) {
    double s = 0.0, s2 = 0.0;
    for (const auto& p : pts) {
      auto v = exp_moment_vector(idx, p);
      const double r = v[k] / v[0];
      s += r;
      s2 += r * r;
    }
    const double mean = s / count;
    const double se = std::sqrt((s2 / count - mean * mean) / count);
    // the sampler drops the far tail |x| > 4, a bias far below the band
    CHECK(std::abs(mean - a[k] / a[0]) <= 3.0 * se + 1e-4);
  }
  CHECK(density_samples(1, 3, 10, 5) == density_samples(1, 3, 10, 5));
}

TEST_CASE("decomposition of (1,2) from a 41x41 grid") {
  IndexSet idx(1, 2);
  auto a = target_moment_vector(idx);
  DecompositionConfig cfg;
  cfg.random_subsets = 50;
  cfg.swap_rounds = 0;
  auto dec = decompose_from_pool(a, idx, grid(-2, 2, 41, 2), cfg);
  auto rep = verify_decomposition(dec, a);
  CHECK(rep.pass);
  CHECK(dec.size() >= 3);
  CHECK(rep.residual <= 1e-10);
  CHECK(dec.weights.minCoeff() > 0.0);
  CHECK(dec.strict_margin > 0.0);
  CHECK(rep.inverse_error <= 1e-8);
}

TEST_CASE("target on a ray of the cone gives the single point") {
  IndexSet idx(1, 2);
  const std::vector<double> q = {2.0, 2.0};  // a vertex of the projected hull
  auto pool = grid(-2, 2, 41, 2);
  DecompositionConfig cfg;
  cfg.random_subsets = 20;
  cfg.swap_rounds = 0;
  auto dec = decompose_from_pool(exp_moment_vector(idx, q), idx, pool, cfg);
  REQUIRE(dec.size() == 1);
  CHECK(dec.points[0] == q);
  CHECK(dec.weights[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("decompose (2,2) and (3,2) with the default pool") {
  for (auto [m, n] : {std::pair{2, 2}, {3, 2}, {1, 3}}) {
    IndexSet idx(m, n);
    auto a = target_moment_vector(idx);
    auto dec = decompose(a, idx);
    auto rep = verify_decomposition(dec, a);
    CHECK(rep.pass);
    CHECK(dec.size() >= idx.size());
    CHECK(std::isfinite(dec.condition));
    CHECK(dec.L_inv_norm == doctest::Approx(rep.L_inv_norm).epsilon(1e-8));
  }
}

TEST_CASE("decomposition is deterministic for a fixed seed") {
  IndexSet idx(2, 2);
  auto a = target_moment_vector(idx);
  DecompositionConfig cfg;
  cfg.seed = 42;
  auto d1 = decompose(a, idx, cfg);
  auto d2 = decompose(a, idx, cfg);
  CHECK(d1.points == d2.points);
  CHECK(d1.weights == d2.weights);
  CHECK(d1.pivot_order == d2.pivot_order);
}

TEST_CASE("pivot selection") {
  IndexSet idx(1, 2);
  SUBCASE("coordinate rays, condition from an SVD oracle") {
    ConeDecomposition dec;
    dec.m = 1;
    dec.n = 2;
    dec.points = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {2.0, 0.0}, {0.0, 2.0}};
    dec.weights = Eigen::VectorXd::Ones(5);
    auto piv = select_pivot_basis(dec);
    Eigen::MatrixXd l(3, 3);
    for (int k = 0; k < 3; ++k) l.col(k) = exp_moment_vector(idx, piv.points[k]);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(l);
    const auto& sv = svd.singularValues();
    CHECK(piv.L_inv_norm == doctest::Approx(1.0 / sv[2]).epsilon(1e-10));
    CHECK(piv.condition == doctest::Approx(sv[0] / sv[2]).epsilon(1e-10));
    std::set<std::size_t> seen(piv.pivot_order.begin(), piv.pivot_order.end());
    CHECK(seen.size() == 5);
  }
  SUBCASE("duplicates never both enter") {
    ConeDecomposition dec;
    dec.m = 1;
    dec.n = 2;
    dec.points = {{0.3, 0.3}, {0.3, 0.3}, {-1.0, 0.5}, {0.5, -1.0}};
    dec.weights = Eigen::VectorXd::Ones(4);
    auto piv = select_pivot_basis(dec);
    std::set<std::size_t> first(piv.pivot_order.begin(), piv.pivot_order.begin() + 3);
    CHECK(!(first.count(0) && first.count(1)));
  }
  SUBCASE("M = N gives a permutation") {
    ConeDecomposition dec;
    dec.m = 1;
    dec.n = 2;
    dec.points = {{0.1, -0.4}, {-1.0, 0.2}, {0.6, 0.6}};
    dec.weights = Eigen::VectorXd::Ones(3);
    auto piv = select_pivot_basis(dec);
    std::set<std::size_t> seen(piv.pivot_order.begin(), piv.pivot_order.end());
    CHECK(seen == std::set<std::size_t>{0, 1, 2});
  }
  SUBCASE("rank deficiency") {
    ConeDecomposition dec;
    dec.m = 1;
    dec.n = 2;
    dec.points = {{0.1, 0.1}, {0.1, 0.1}, {0.1, 0.1}};
    dec.weights = Eigen::VectorXd::Ones(3);
    CHECK_THROWS_AS(select_pivot_basis(dec), RankDeficient);
  }
}

TEST_CASE("verify_decomposition flags constructed failures") {
  IndexSet idx(1, 2);
  auto a = target_moment_vector(idx);
  auto dec = decompose(a, idx);
  REQUIRE(verify_decomposition(dec, a).pass);

  auto negated = dec;
  negated.weights[0] = -negated.weights[0];
  auto r1 = verify_decomposition(negated, a);
  CHECK(!r1.pass);
  CHECK(std::find(r1.failures.begin(), r1.failures.end(), "positivity") != r1.failures.end());

  auto zeroed = dec;
  zeroed.points.back() = {-60.0, -60.0};  // column numerically zero
  auto r2 = verify_decomposition(zeroed, a);
  CHECK(!r2.pass);
  CHECK(std::find(r2.failures.begin(), r2.failures.end(), "residual") != r2.failures.end());
}
