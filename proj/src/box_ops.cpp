#include "bergman/box_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bergman/errors.hpp"

namespace bergman {

std::optional<AxisBox> intersect(const AxisBox& a, const AxisBox& b) {
  if (a.dim() != b.dim()) throw ValidationError("box dimensions differ");
  AxisBox out{Point(a.dim()), Point(a.dim())};
  for (std::size_t k = 0; k < a.dim(); ++k) {
    out.lower[k] = std::max(a.lower[k], b.lower[k]);
    out.upper[k] = std::min(a.upper[k], b.upper[k]);
    if (!(out.lower[k] < out.upper[k])) return std::nullopt;
  }
  return out;
}

std::vector<AxisBox> subtract(const AxisBox& a, const AxisBox& b) {
  auto cut = intersect(a, b);
  if (!cut) return {a};
  std::vector<AxisBox> out;
  AxisBox rest = a;
  // peel slabs off axis by axis; what remains at the end is the cut itself
  for (std::size_t k = 0; k < a.dim(); ++k) {
    if (rest.lower[k] < cut->lower[k]) {
      AxisBox slab = rest;
      slab.upper[k] = cut->lower[k];
      out.push_back(std::move(slab));
      rest.lower[k] = cut->lower[k];
    }
    if (cut->upper[k] < rest.upper[k]) {
      AxisBox slab = rest;
      slab.lower[k] = cut->upper[k];
      out.push_back(std::move(slab));
      rest.upper[k] = cut->upper[k];
    }
  }
  return out;
}

std::vector<AxisBox> disjointify(std::span<const AxisBox> boxes) {
  std::vector<AxisBox> done;
  for (const auto& box : boxes) {
    if (box.empty()) continue;
    std::vector<AxisBox> pieces{box};
    for (const auto& f : done) {
      std::vector<AxisBox> next;
      for (const auto& p : pieces) {
        auto parts = subtract(p, f);
        for (auto& q : parts) next.push_back(std::move(q));
      }
      pieces = std::move(next);
      if (pieces.empty()) break;
    }
    for (auto& p : pieces) done.push_back(std::move(p));
  }
  return done;
}

Point nearest_point(const AxisBox& b) {
  Point p(b.dim());
  for (std::size_t k = 0; k < b.dim(); ++k) {
    if (b.lower[k] > 0) p[k] = b.lower[k];
    else if (b.upper[k] < 0) p[k] = b.upper[k];
    else p[k] = 0;
  }
  return p;
}

Point farthest_point(const AxisBox& b) {
  Point p(b.dim());
  for (std::size_t k = 0; k < b.dim(); ++k)
    p[k] = abs(b.lower[k]) > abs(b.upper[k]) ? b.lower[k] : b.upper[k];
  return p;
}

Coord min_squared_norm(const AxisBox& b) { return squared_norm(nearest_point(b)); }
Coord max_squared_norm(const AxisBox& b) { return squared_norm(farthest_point(b)); }

Coord volume(const AxisBox& b) {
  Coord v = 1;
  for (std::size_t k = 0; k < b.dim(); ++k) v *= std::max(Coord(0), b.upper[k] - b.lower[k]);
  return v;
}

LogMomentVector log_box_moment(const IndexSet& idx, const AxisBox& b) {
  const std::size_t n = b.dim();
  if (n != static_cast<std::size_t>(idx.n())) throw ValidationError("box dimension does not match n");
  std::vector<SplitDouble> corner(n);
  std::vector<double> width(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (b.upper[k] < b.lower[k]) throw ValidationError("box with lower > upper");
    corner[k] = split2(b.lower[k]);
    width[k] = to_double(b.upper[k] - b.lower[k]);
  }
  LogMomentVector out{Eigen::VectorXd(idx.size())};
  for (std::size_t i = 0; i < idx.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      s += log_exp_integral(2.0 * (idx[i][k] + 1), corner[k].hi, corner[k].lo, width[k]);
    out.log_values[i] = s;
  }
  return out;
}

MomentVector box_moment(const IndexSet& idx, const AxisBox& b) {
  if (b.empty()) return MomentVector::Zero(idx.size());
  return log_box_moment(idx, b).exp();
}

Coord distance(const AxisBox& b, const Point& p) {
  Coord s = 0;
  for (std::size_t k = 0; k < b.dim(); ++k) {
    Coord d = 0;
    if (p[k] < b.lower[k]) d = b.lower[k] - p[k];
    else if (p[k] > b.upper[k]) d = p[k] - b.upper[k];
    s += d * d;
  }
  return sqrt(s);
}

}  // namespace bergman
