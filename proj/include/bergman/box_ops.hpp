#pragma once

#include <optional>
#include <vector>

#include "bergman/moments.hpp"
#include "bergman/primitives.hpp"

namespace bergman {

// Intersection of two open boxes; nullopt when its interior is empty.
std::optional<AxisBox> intersect(const AxisBox& a, const AxisBox& b);

// a minus b as at most 2n disjoint boxes (up to boundaries).
std::vector<AxisBox> subtract(const AxisBox& a, const AxisBox& b);

// Disjoint boxes covering the union of the input (up to boundaries).
std::vector<AxisBox> disjointify(std::span<const AxisBox> boxes);

// Extremes of |x|^2 over the closed box.
Coord min_squared_norm(const AxisBox& b);
Coord max_squared_norm(const AxisBox& b);
// Closest and farthest points of the closed box to the origin.
Point nearest_point(const AxisBox& b);
Point farthest_point(const AxisBox& b);

Coord volume(const AxisBox& b);

// Exact exponential moments of the box, evaluated in log space from the
// extended-precision corner and width.
LogMomentVector log_box_moment(const IndexSet& idx, const AxisBox& b);
MomentVector box_moment(const IndexSet& idx, const AxisBox& b);

// Distance from the closed box to a point.
Coord distance(const AxisBox& b, const Point& p);

}  // namespace bergman
