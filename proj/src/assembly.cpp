#include "bergman/assembly.hpp"

#include <algorithm>
#include <cmath>

#include "bergman/errors.hpp"
#include "bergman/relations.hpp"
#include "bergman/routing.hpp"
#include "bergman/union_moment.hpp"

namespace bergman {

namespace {

const Coord kWidthFloor("1e-300");

Point offset(const std::vector<double>& base, std::size_t axis, const Coord& d) {
  Point p = make_point(base);
  p[axis] += d;
  return p;
}

// Staircase waypoints from `from` to `to`, changing one coordinate at a time
// in axis order.
std::vector<Point> staircase(const Point& from, const Point& to) {
  std::vector<Point> out{from};
  Point cur = from;
  for (std::size_t k = 0; k < from.size(); ++k) {
    if (cur[k] == to[k]) continue;
    cur[k] = to[k];
    out.push_back(cur);
  }
  return out;
}

BudgetEntry entry(std::string piece, const CertifiedMoment& m, double budget, double cap) {
  BudgetEntry e{std::move(piece), m.value.norm(), m.error_norm(), budget, cap, false};
  e.pass = e.norm + e.error <= budget;
  return e;
}

}  // namespace

double hub_radius(const RunParameters& p) { return (p.radius_b1 + p.radius_b2) / 2.0; }

std::vector<Primitive> AssembledBackground::primitives() const {
  std::vector<Primitive> out{hub, tail, tail_corridor, simplex, simplex_corridor};
  for (const auto& u : anchors) out.emplace_back(u);
  for (const auto& g : skeleton) out.emplace_back(g);
  return out;
}

bool AssembledBackground::budgets_hold() const {
  return std::all_of(budget_report.begin(), budget_report.end(), [](const BudgetEntry& e) { return e.pass; });
}

double choose_tail_threshold(const RunParameters& p, double cap) {
  IndexSet idx(p.m, p.n);
  // tail points have |x| > sqrt(n) R, so R >= R2 / sqrt(n) keeps them out of B2
  double R = std::max(1.25, std::ceil(4.0 * p.radius_b2 / std::sqrt(static_cast<double>(p.n))) / 4.0);
  for (;; R += 0.25) {
    TailRegion t{p.n, R, tail_gamma(p.m, p.n)};
    double sq = 0.0;
    for (const auto& a : idx) {
      const double up = tail_bracket(a, p.m, t).upper;
      sq += up * up;
    }
    if (std::sqrt(sq) <= cap) return R;
  }
}

SphericalShell build_hub_shell(const RunParameters& p, const IndexSet& idx, double cap) {
  const double r_mid = hub_radius(p);
  const double probe = std::min(1.0, (p.radius_b2 - p.radius_b1) / 4.0);
  // the moment is linear in the width to first order
  const double per_width = shell_moment(SphericalShell{p.n, r_mid, probe}, idx).value.norm() / probe;
  double width = std::min(probe, 0.5 * cap / per_width);
  while (width > 1e-300) {
    SphericalShell s{p.n, r_mid, width};
    auto m = shell_moment(s, idx);
    if (m.value.norm() + m.error_norm() <= cap) return s;
    width /= 2.0;
  }
  throw BudgetExceeded("hub shell width reached its floor");
}

AxisBox anchor_box(const RunParameters& p, const std::vector<double>& point) {
  AxisBox b{make_point(point), make_point(point)};
  const Coord d4 = 4 * Coord(p.delta), e = p.eps;
  b.lower[0] -= d4;
  b.upper[0] += d4;
  b.lower[1] += e - d4;
  b.upper[1] += e + d4;
  for (std::size_t k = 2; k < point.size(); ++k) {
    b.lower[k] -= e;
    b.upper[k] += e;
  }
  return b;
}

BoxChainCorridor route_tail_corridor(const RunParameters& p, const TailRegion& tail,
                                     const IndexSet& idx, double cap) {
  const Coord r_mid = hub_radius(p);
  const Coord q = r_mid / sqrt(Coord(p.n));
  const Coord end = Coord(tail.R) + Coord(1e-3);
  auto way = staircase(Point(p.n, q), Point(p.n, end));
  RouteConstraints rc;
  rc.outside_radius = Coord(p.radius_b1);
  rc.positive_orthant = true;
  rc.moment_budget = cap;
  return route_path("tail corridor", way, rc, idx, std::vector<Coord>(way.size() - 1, Coord(1)),
                    kWidthFloor);
}

BoxChainCorridor route_simplex_corridor(const RunParameters& p, const LogSimplexShell& simplex,
                                        const IndexSet& idx, double cap) {
  const Coord r_mid = hub_radius(p);
  const Coord q = r_mid / sqrt(Coord(p.n));
  // end on the diagonal just below the top level c s0
  const Coord eta = Coord(1e-6) * (1 - Coord(simplex.mu));
  const Coord z = log(simplex.upper_level() * (1 - eta) / p.n) / 2;
  auto way = staircase(Point(p.n, -q), Point(p.n, z));
  RouteConstraints rc;
  rc.outside_radius = Coord(p.radius_b1);
  rc.min_S = simplex.lower_level();
  rc.moment_budget = cap;
  return route_path("simplex corridor", way, rc, idx, std::vector<Coord>(way.size() - 1, Coord(1)),
                    kWidthFloor);
}

BoxChainCorridor route_skeleton(const RunParameters& p, const ConeDecomposition& dec, std::size_t j,
                                const IndexSet& idx, double cap) {
  const auto& pj = dec.points.at(j);
  const double rho = p.rho;
  std::vector<Ball> others;
  for (std::size_t k = 0; k < dec.size(); ++k)
    if (k != j) others.push_back({make_point(dec.points[k]), Coord(2.0 * rho)});

  // leave the anchor upwards, above the top face of Q
  // the top of the vertical leg is a double so the lattice path continues it exactly
  std::vector<double> top = pj;
  top[1] += 2.0 * rho;
  std::vector<Point> way{offset(pj, 1, Coord(p.eps) + 2 * Coord(p.delta)), make_point(top)};
  std::vector<Coord> h_max{Coord(p.delta)};

  auto obstacles = others;
  obstacles.push_back({make_point(pj), Coord(1.5 * rho)});
  const double g = rho / 4.0;
  const auto turns = lattice_escape(top, g, p.max_point_norm + 2.0 * rho + g,
                                    obstacles, rho / 100.0);
  for (std::size_t i = 1; i < turns.size(); ++i) {
    way.push_back(make_point(turns[i]));
    h_max.push_back(Coord(rho / 8.0));
  }
  // out along the dominant axis until |x| = r_mid, inside the hub
  const Coord r_mid = hub_radius(p);
  Point last = way.back();
  std::size_t d = 0;
  for (std::size_t k = 1; k < last.size(); ++k)
    if (abs(last[k]) > abs(last[d])) d = k;
  Coord rest = 0;
  for (std::size_t k = 0; k < last.size(); ++k)
    if (k != d) rest += last[k] * last[k];
  last[d] = (last[d] < 0 ? -1 : 1) * sqrt(r_mid * r_mid - rest);
  way.push_back(last);
  h_max.push_back(Coord(rho / 8.0));

  RouteConstraints rc;
  rc.obstacles = others;
  rc.moment_budget = cap;
  return route_path("skeleton " + std::to_string(j), way, rc, idx, h_max, kWidthFloor);
}

AssembledBackground build_background(const RunParameters& p, const ConeDecomposition& dec,
                                     const AssemblyConfig& config) {
  IndexSet idx(p.m, p.n);
  const double cA = p.c * target_moment_vector(idx).norm();
  const double cap = config.cap_fraction * cA;
  const double c2 = p.c * p.c;

  AssembledBackground bg;
  bg.params = p;
  bg.hub = build_hub_shell(p, idx, cap);
  bg.tail = TailRegion{p.n, choose_tail_threshold(p, cap), tail_gamma(p.m, p.n)};
  bg.simplex = LogSimplexShell{p.n, p.mu, p.c, p.s0};
  bg.tail_corridor = route_tail_corridor(p, bg.tail, idx, cap);
  bg.simplex_corridor = route_simplex_corridor(p, bg.simplex, idx, cap);
  const double skeleton_cap = cap / static_cast<double>(dec.size());
  for (std::size_t j = 0; j < dec.size(); ++j) {
    bg.anchors.push_back(anchor_box(p, dec.points[j]));
    bg.skeleton.push_back(route_skeleton(p, dec, j, idx, skeleton_cap));
  }

  std::vector<Primitive> skeleton_pieces;
  for (const auto& u : bg.anchors) skeleton_pieces.emplace_back(u);
  for (const auto& g : bg.skeleton) skeleton_pieces.emplace_back(g);
  bg.budget_report = {
      entry("hub shell", shell_moment(bg.hub, idx), c2, cap),
      entry("tail", tail_moment(bg.tail, idx), c2 / 2.0, cap),
      entry("tail corridor", corridor_moment(bg.tail_corridor, idx), c2 / 2.0, cap),
      entry("log-simplex shell", simplex_shell_moment(bg.simplex, idx), c2 / 2.0, c2 / 2.0),
      entry("simplex corridor", corridor_moment(bg.simplex_corridor, idx), c2 / 2.0, cap),
      entry("skeleton", union_moment(skeleton_pieces, idx).moment, c2, c2),
  };

  const auto pieces = bg.primitives();
  auto total = union_moment(pieces, idx);
  bg.moment = total.moment;
  bg.fragments = total.fragments;
  bg.budget_report.push_back(entry("background total", bg.moment, 4.0 * c2, 4.0 * c2));
  bg.connected = connectivity(pieces).connected();

  for (const auto& a : multi_indices_of_degree(p.m + 1, p.n))
    bg.certificates.push_back(divergence_certificate(a, p.m, pieces));
  return bg;
}

}  // namespace bergman
