#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bergman/primitives.hpp"
#include "bergman/multi_index.hpp"

namespace bergman {

// Closed ball a corridor must stay away from.
struct Ball {
  Point center;
  Coord radius;
};

struct RouteConstraints {
  std::vector<Ball> obstacles;
  std::optional<Coord> outside_radius;  // boxes stay outside the closed ball |x| <= this
  std::optional<Coord> min_S;           // inf S over every box must exceed this
  bool positive_orthant = false;        // boxes inside (0, inf)^n
  double moment_budget = 0.0;           // norm bound for the whole corridor
  // optional extra predicate evaluated on every box
  std::function<bool(const AxisBox&)> extra;
};

// Box around the axis-aligned segment [a, b] with half-width h.
AxisBox segment_box(const Point& a, const Point& b, const Coord& h);

bool admissible(const AxisBox& box, const RouteConstraints& rc);

// Staircase through the given waypoints (consecutive ones differ in one
// coordinate). Each segment gets the largest half-width up to h_max[k]
// (found by bisection in log scale) whose box satisfies the constraints and
// an equal share of the moment budget. Throws RoutingFailed when a segment
// admits no width above h_floor.
BoxChainCorridor route_path(const std::string& name, const std::vector<Point>& waypoints,
                            const RouteConstraints& rc, const IndexSet& idx,
                            const std::vector<Coord>& h_max, const Coord& h_floor);

// Axis-aligned lattice path from `start` (spacing g) to any node with norm
// above goal_radius whose edges keep a clearance from every obstacle.
// Returns the turning points. Throws RoutingFailed when the search budget
// runs out.
std::vector<std::vector<double>> lattice_escape(const std::vector<double>& start, double g,
                                                double goal_radius, const std::vector<Ball>& obstacles,
                                                double clearance, std::size_t max_nodes = 2'000'000);

}  // namespace bergman
