#include "bergman/routing.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <unordered_map>

#include "bergman/box_ops.hpp"
#include "bergman/errors.hpp"

namespace bergman {

namespace {

struct LatticeHash {
  std::size_t operator()(const std::vector<int>& v) const {
    std::size_t h = 1469598103934665603ULL;
    for (int x : v) h = (h ^ static_cast<std::size_t>(static_cast<unsigned>(x))) * 1099511628211ULL;
    return h;
  }
};

double segment_distance(const std::vector<double>& a, const std::vector<double>& b,
                        const std::vector<double>& p) {
  double ab2 = 0.0, t = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ab2 += (b[k] - a[k]) * (b[k] - a[k]);
    t += (p[k] - a[k]) * (b[k] - a[k]);
  }
  t = ab2 > 0.0 ? std::clamp(t / ab2, 0.0, 1.0) : 0.0;
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double q = a[k] + t * (b[k] - a[k]) - p[k];
    d += q * q;
  }
  return std::sqrt(d);
}

double norm(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

}  // namespace

AxisBox segment_box(const Point& a, const Point& b, const Coord& h) {
  AxisBox box{a, b};
  for (std::size_t k = 0; k < a.size(); ++k) {
    box.lower[k] = std::min(a[k], b[k]) - h;
    box.upper[k] = std::max(a[k], b[k]) + h;
  }
  return box;
}

bool admissible(const AxisBox& box, const RouteConstraints& rc) {
  if (rc.positive_orthant)
    for (const auto& l : box.lower)
      if (!(l > 0)) return false;
  if (rc.outside_radius && !(min_squared_norm(box) > *rc.outside_radius * *rc.outside_radius))
    return false;
  if (rc.min_S && !(S_value(box.lower) > *rc.min_S)) return false;
  for (const auto& ball : rc.obstacles)
    if (!(distance(box, ball.center) > ball.radius)) return false;
  if (rc.extra && !rc.extra(box)) return false;
  return true;
}

BoxChainCorridor route_path(const std::string& name, const std::vector<Point>& waypoints,
                            const RouteConstraints& rc, const IndexSet& idx,
                            const std::vector<Coord>& h_max, const Coord& h_floor) {
  if (waypoints.size() < 2) throw ValidationError("corridor needs at least two waypoints");
  const std::size_t segments = waypoints.size() - 1;
  if (h_max.size() != segments) throw ValidationError("one maximal width per segment expected");
  const double box_cap = rc.moment_budget / static_cast<double>(segments);

  BoxChainCorridor out;
  out.name = name;
  out.entry = waypoints.front();
  out.exit = waypoints.back();
  for (std::size_t k = 0; k < segments; ++k) {
    const Point& a = waypoints[k];
    const Point& b = waypoints[k + 1];
    int moving = 0;
    for (std::size_t i = 0; i < a.size(); ++i) moving += a[i] != b[i];
    if (moving > 1) throw ValidationError("corridor waypoints must differ in one coordinate");
    auto fits = [&](const Coord& h) {
      AxisBox box = segment_box(a, b, h);
      if (!admissible(box, rc)) return false;
      const LogMomentVector lm = log_box_moment(idx, box);
      const double log_cap = std::log(box_cap);
      double biggest = -std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < lm.log_values.size(); ++i) biggest = std::max(biggest, lm.log_values[i]);
      // |v| <= sqrt(N) max entry
      return biggest + 0.5 * std::log(static_cast<double>(lm.log_values.size())) <= log_cap;
    };
    Coord chosen = h_max[k];
    if (!fits(chosen)) {
      if (!fits(h_floor))
        throw RoutingFailed("corridor '" + name + "' segment " + std::to_string(k) +
                            " admits no width above the floor");
      double lo = std::log(to_double(h_floor)), hi = std::log(to_double(h_max[k]));
      for (int it = 0; it < 60; ++it) {
        const double mid = (lo + hi) / 2.0;
        if (fits(Coord(std::exp(mid)))) lo = mid;
        else hi = mid;
      }
      chosen = Coord(std::exp(lo));
    }
    out.segments.push_back(segment_box(a, b, chosen));
  }
  return out;
}

std::vector<std::vector<double>> lattice_escape(const std::vector<double>& start, double g,
                                                double goal_radius, const std::vector<Ball>& obstacles,
                                                double clearance, std::size_t max_nodes) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> centers;
  std::vector<double> radii;
  for (const auto& b : obstacles) {
    centers.push_back(to_doubles(b.center));
    radii.push_back(to_double(b.radius) + clearance);
  }
  auto position = [&](const std::vector<int>& node) {
    std::vector<double> x(start);
    for (std::size_t k = 0; k < n; ++k) x[k] += g * node[k];
    return x;
  };
  auto edge_ok = [&](const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < centers.size(); ++i)
      if (segment_distance(a, b, centers[i]) <= radii[i]) return false;
    return true;
  };

  struct Entry {
    double f;
    double r;
    int steps;
    std::vector<int> node;
    bool operator<(const Entry& o) const { return f != o.f ? f > o.f : r < o.r; }
  };
  std::unordered_map<std::vector<int>, std::vector<int>, LatticeHash> parent;
  std::unordered_map<std::vector<int>, int, LatticeHash> best;
  std::priority_queue<Entry> open;
  const std::vector<int> origin(n, 0);
  auto heuristic = [&](const std::vector<double>& x) { return std::max(0.0, goal_radius - norm(x)) / g; };
  open.push({heuristic(start), norm(start), 0, origin});
  best[origin] = 0;
  std::size_t expanded = 0;
  while (!open.empty()) {
    Entry e = open.top();
    open.pop();
    if (best[e.node] < e.steps) continue;
    const auto x = position(e.node);
    if (norm(x) > goal_radius) {
      // walk back and keep the turning points
      std::vector<std::vector<int>> chain{e.node};
      while (chain.back() != origin) chain.push_back(parent.at(chain.back()));
      std::reverse(chain.begin(), chain.end());
      std::vector<std::vector<double>> turns{position(chain.front())};
      for (std::size_t i = 1; i + 1 < chain.size(); ++i) {
        bool straight = true;
        for (std::size_t k = 0; k < n; ++k)
          straight &= chain[i][k] - chain[i - 1][k] == chain[i + 1][k] - chain[i][k];
        if (!straight) turns.push_back(position(chain[i]));
      }
      if (chain.size() > 1) turns.push_back(position(chain.back()));
      return turns;
    }
    if (++expanded > max_nodes) break;
    for (std::size_t k = 0; k < n; ++k)
      for (int step : {1, -1}) {
        auto next = e.node;
        next[k] += step;
        auto it = best.find(next);
        if (it != best.end() && it->second <= e.steps + 1) continue;
        const auto y = position(next);
        if (!edge_ok(x, y)) continue;
        best[next] = e.steps + 1;
        parent[next] = e.node;
        open.push({e.steps + 1 + heuristic(y), norm(y), e.steps + 1, next});
      }
  }
  throw RoutingFailed("lattice search found no obstacle-free escape");
}

}  // namespace bergman
