#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bergman/assembly.hpp"
#include "bergman/box_ops.hpp"
#include "bergman/errors.hpp"
#include "bergman/random.hpp"
#include "bergman/relations.hpp"

using namespace bergman;

namespace {

const ConeDecomposition& decomposition12() {
  static const ConeDecomposition dec = [] {
    const IndexSet idx(1, 2);
    return decompose(target_moment_vector(idx), idx);
  }();
  return dec;
}

const AssembledBackground& background12() {
  static const AssembledBackground bg = build_background(
      derive_run_parameters(1, 2, 1e-3, 0.5, decomposition12()), decomposition12());
  return bg;
}

double cap12() { return 1e-10 * 1e-3 * target_moment_vector(IndexSet(1, 2)).norm(); }

}  // namespace

TEST_CASE("run parameters follow their defining formulas") {
  const auto& dec = decomposition12();
  const double c = 1e-3;
  const auto p = derive_run_parameters(1, 2, c, 0.5, dec);
  CHECK(p.delta == doctest::Approx(c * c).epsilon(1e-15));
  CHECK(p.eps == doctest::Approx(std::sqrt(c)).epsilon(1e-15));
  CHECK(p.sigma == doctest::Approx(2.0 * std::sqrt(c)).epsilon(1e-15));
  CHECK(p.N == 3);
  CHECK(p.M == dec.size());
  CHECK(p.radius_b2 == doctest::Approx(1.5 * p.radius_b1));
  CHECK(p.r_c == doctest::Approx(0.5 * c * dec.weights.head(3).minCoeff()));
  for (std::size_t j = 0; j < p.M; ++j) CHECK(p.t0[j] == doctest::Approx(c * dec.weights[static_cast<Eigen::Index>(j)]));
  CHECK(p.conditions_hold());

  // s = min of S over the ball of radius R2, attained on the sphere
  Rng rng(3);
  double sampled = INFINITY;
  for (int i = 0; i < 200000; ++i) {
    const double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
    sampled = std::min(sampled, std::exp(2 * p.radius_b2 * std::cos(th)) + std::exp(2 * p.radius_b2 * std::sin(th)));
  }
  CHECK(p.s <= sampled);
  CHECK(sampled <= p.s * (1.0 + 1e-6));

  // kappa2 bounds every |grad v_alpha| = |k| e^{<k,x>} on the ball
  const IndexSet idx(1, 2);
  for (int i = 0; i < 20000; ++i) {
    const double th = rng.uniform(0.0, 2.0 * std::numbers::pi), r = p.radius_b2 * std::sqrt(rng.uniform());
    const double x[] = {r * std::cos(th), r * std::sin(th)};
    const auto v = exp_moment_vector(idx, x);
    for (std::size_t a = 0; a < idx.size(); ++a) {
      const double k = 2.0 * std::hypot(idx[a][0] + 1.0, idx[a][1] + 1.0);
      CHECK(k * v[static_cast<Eigen::Index>(a)] <= p.kappa2 * (1 + 1e-12));
    }
  }
}

TEST_CASE("run parameters reject invalid input") {
  const auto& dec = decomposition12();
  CHECK_THROWS_AS(derive_run_parameters(1, 1, 1e-3, 0.5, dec), ValidationError);
  CHECK_THROWS_AS(derive_run_parameters(0, 2, 1e-3, 0.5, dec), ValidationError);
  CHECK_THROWS_AS(derive_run_parameters(1, 2, 1.5, 0.5, dec), ValidationError);
  CHECK_THROWS_AS(derive_run_parameters(1, 2, 1e-3, 1.0, dec), ValidationError);
  CHECK_THROWS_AS(derive_run_parameters(1, 2, 1e-3, 0.5, dec, 1.0), ValidationError);
  CHECK_THROWS_AS(derive_run_parameters(2, 2, 1e-3, 0.5, dec), ValidationError);
  CHECK(default_beta(3) == doctest::Approx(1.0 / 3.0));
  CHECK(parse_growth("one_sided") == Growth::one_sided);
  CHECK_THROWS_AS(parse_growth("sideways"), ValidationError);
}

TEST_CASE("large c fails the smallness conditions") {
  const auto p = derive_run_parameters(1, 2, 0.5, 0.5, decomposition12());
  CHECK_FALSE(p.conditions_hold());
  CHECK(!p.first_failure().empty());
}

TEST_CASE("tail threshold meets its cap and grows as the cap shrinks") {
  const auto p = derive_run_parameters(1, 2, 1e-3, 0.5, decomposition12());
  const IndexSet idx(1, 2);
  double last = 0.0;
  for (double cap : {1e-6, 1e-10, 1e-14, 1e-18}) {
    const double R = choose_tail_threshold(p, cap);
    CHECK(R >= last);
    CHECK(std::sqrt(2.0) * R > p.radius_b2);
    CHECK(std::fmod(R, 0.25) == 0.0);
    const TailRegion t{2, R, tail_gamma(1, 2)};
    double upper = 0.0;
    for (const auto& a : idx) upper += std::pow(tail_bracket(a, 1, t).upper, 2);
    CHECK(std::sqrt(upper) <= cap);
    last = R;
  }
}

TEST_CASE("hub shell sits between the two balls and scales with its width") {
  const auto& bg = background12();
  const auto& p = bg.params;
  const IndexSet idx(1, 2);
  CHECK(to_double(bg.hub.inner_radius()) > p.radius_b1);
  CHECK(to_double(bg.hub.outer_radius()) < p.radius_b2);
  const auto m = shell_moment(bg.hub, idx);
  CHECK(m.value.norm() + m.error_norm() <= cap12());

  // thin shell: moment = width * 2 pi r I0(|k| r) to first order
  for (std::size_t a = 0; a < idx.size(); ++a) {
    const double k = 2.0 * std::hypot(idx[a][0] + 1.0, idx[a][1] + 1.0), r = bg.hub.r_mid;
    const double oracle = bg.hub.width * 2.0 * std::numbers::pi * r * std::cyl_bessel_i(0.0, k * r);
    CHECK(m.value[static_cast<Eigen::Index>(a)] == doctest::Approx(oracle).epsilon(1e-6));
  }
  SphericalShell half = bg.hub;
  half.width /= 2.0;
  const auto mh = shell_moment(half, idx);
  for (Eigen::Index a = 0; a < mh.value.size(); ++a)
    CHECK(mh.value[a] / m.value[a] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("corridors respect their routing constraints") {
  const auto& bg = background12();
  const auto& p = bg.params;
  const IndexSet idx(1, 2);
  const Coord r1sq = Coord(p.radius_b1) * Coord(p.radius_b1);
  for (const auto& s : bg.tail_corridor.segments) {
    for (const auto& x : s.lower) CHECK(x >= 0);
    CHECK(min_squared_norm(s) > r1sq);
  }
  for (const auto& s : bg.simplex_corridor.segments) {
    CHECK(min_S(Primitive(s)) > bg.simplex.lower_level());
    CHECK(min_squared_norm(s) > r1sq);
  }
  CHECK(corridor_moment(bg.tail_corridor, idx).value.norm() <= cap12());
  CHECK(corridor_moment(bg.simplex_corridor, idx).value.norm() <= cap12());

  // each corridor meets both of its ends
  CHECK_FALSE(relate(bg.tail_corridor, bg.hub).disjoint);
  CHECK_FALSE(relate(bg.tail_corridor, bg.tail).disjoint);
  CHECK_FALSE(relate(bg.simplex_corridor, bg.hub).disjoint);
  CHECK_FALSE(relate(bg.simplex_corridor, bg.simplex).disjoint);

  // skeleton paths avoid the 2 rho balls of the other points
  const auto& dec = decomposition12();
  for (std::size_t j = 0; j < bg.skeleton.size(); ++j)
    for (const auto& s : bg.skeleton[j].segments)
      for (std::size_t k = 0; k < dec.size(); ++k)
        if (k != j) CHECK(to_double(distance(s, make_point(dec.points[k]))) > 2.0 * p.rho);
}

TEST_CASE("anchor boxes straddle the top face of the cross-section") {
  const auto& bg = background12();
  const auto& p = bg.params;
  const auto& x = decomposition12().points[0];
  const auto u = anchor_box(p, x);
  CHECK(to_double(u.lower[0] - Coord(x[0])) == doctest::Approx(-4 * p.delta));
  CHECK(to_double(u.upper[1] - Coord(x[1])) == doctest::Approx(p.eps + 4 * p.delta));
  CHECK(to_double(u.lower[1] - Coord(x[1])) == doctest::Approx(p.eps - 4 * p.delta));
}

TEST_CASE("background meets its budgets and is connected through the hub") {
  const auto& bg = background12();
  const double c2 = bg.params.c * bg.params.c;
  REQUIRE(bg.budget_report.size() == 7);
  CHECK(bg.budget_report.back().piece == "background total");
  for (const auto& e : bg.budget_report) {
    INFO(e.piece);
    CHECK(e.pass);
    CHECK(e.norm + e.error <= e.budget);
  }
  CHECK(bg.moment.value.norm() + bg.moment.error_norm() <= 4 * c2);
  CHECK(bg.budgets_hold());
  CHECK(bg.connected);

  auto pieces = bg.primitives();
  pieces.erase(pieces.begin());  // the hub
  CHECK_FALSE(connectivity(pieces).connected());

  // one certificate per |alpha| = m + 1, all diverging
  CHECK(bg.certificates.size() == 3);
  for (const auto& cert : bg.certificates) {
    CHECK(cert.constant > 0.0);
    CHECK(cert.exponent >= 0.0);
  }
}

TEST_CASE("background pieces are pairwise disjoint except along the chains") {
  const auto& bg = background12();
  // curved pieces never meet each other
  CHECK(relate(bg.hub, bg.tail).disjoint);
  CHECK(relate(bg.hub, bg.simplex).disjoint);
  CHECK(relate(bg.tail, bg.simplex).disjoint);
  // anchors stay inside the balls of their points
  const auto& dec = decomposition12();
  for (std::size_t j = 0; j < dec.size(); ++j) {
    const auto& u = bg.anchors[j];
    CHECK(to_double(distance(u, make_point(dec.points[j]))) < bg.params.rho);
    CHECK(sqrt(max_squared_norm(u)) < Coord(bg.params.radius_b1));
  }
}
