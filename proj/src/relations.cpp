#include "bergman/relations.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "bergman/box_ops.hpp"
#include "bergman/errors.hpp"

namespace bergman {

namespace {

Relation separated(std::string why) { return Relation{true, std::nullopt, std::move(why)}; }
Relation meeting(Point w, std::string why) { return Relation{false, std::move(w), std::move(why)}; }

Point diagonal(int n, const Coord& t) { return Point(static_cast<std::size_t>(n), t); }

Point lerp(const Point& a, const Point& b, const Coord& s) {
  Point p(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) p[k] = a[k] + s * (b[k] - a[k]);
  return p;
}

// Point on the segment [from, to) with f strictly inside (lo, hi), assuming
// f(from) and f(to) lie on opposite sides of the interval's midpoint.
std::optional<Point> bisect_segment(const Point& from, const Point& to,
                                    const std::function<Coord(const Point&)>& f,
                                    const Coord& lo, const Coord& hi) {
  const Coord target = (lo + hi) / 2;
  const bool rising = f(from) < target;
  Coord a = 0, b = 1;
  for (int it = 0; it < 1100; ++it) {
    const Coord s = (a + b) / 2;
    Point p = lerp(from, to, s);
    const Coord v = f(p);
    if (lo < v && v < hi) return p;
    if ((v < target) == rising) a = s;
    else b = s;
  }
  return std::nullopt;
}

Relation box_box(const AxisBox& a, const AxisBox& b) {
  auto cut = intersect(a, b);
  if (!cut) return separated("box sides separated along an axis");
  return meeting(cut->center(), "box overlap");
}

Relation box_shell(const AxisBox& b, const SphericalShell& s) {
  const Coord r1 = s.inner_radius(), r2 = s.outer_radius();
  const Coord lo_sq = min_squared_norm(b), hi_sq = max_squared_norm(b);
  if (hi_sq <= r1 * r1) return separated("box inside the shell's inner ball");
  if (lo_sq >= r2 * r2) return separated("box outside the shell's outer ball");
  const Coord lo = std::max(lo_sq, r1 * r1), hi = std::min(hi_sq, r2 * r2);
  const Point c = b.center();
  const Coord cn = squared_norm(c);
  if (lo < cn && cn < hi) return meeting(c, "box center in shell");
  auto w = bisect_segment(c, cn <= lo ? farthest_point(b) : nearest_point(b), squared_norm, lo, hi);
  if (!w) throw Inconclusive("box-shell witness search failed");
  return meeting(*w, "box meets shell");
}

Relation box_tail(const AxisBox& b, const TailRegion& t) {
  const int n = t.n;
  Coord sum_hi = 0, sum_lo = 0, max_lo = b.lower[0], min_hi = b.upper[0];
  for (std::size_t k = 0; k < b.dim(); ++k) {
    sum_hi += b.upper[k];
    sum_lo += b.lower[k];
    max_lo = std::max(max_lo, b.lower[k]);
    min_hi = std::min(min_hi, b.upper[k]);
  }
  if (sum_hi <= n * Coord(t.R)) return separated("box below the tail's half-space sum x > nR");
  // every tail point has t in (max lower - w, min upper + w), w = e^{-gamma max(R, mean lower)}
  const Coord t_lo = std::max(Coord(t.R), sum_lo / n);
  const Coord w = exp(-Coord(t.gamma) * t_lo);
  if (max_lo - w >= min_hi + w || max_lo - w >= sum_hi / n || min_hi + w <= t_lo)
    return separated("box misses the tail's diagonal neighbourhood");
  const Coord d_lo = std::max(max_lo, Coord(t.R)), d_hi = min_hi;
  if (d_lo < d_hi) return meeting(diagonal(n, (d_lo + d_hi) / 2), "box meets tail on the diagonal");
  throw Inconclusive("box-tail relation undecided");
}

Relation box_simplex(const AxisBox& b, const LogSimplexShell& t) {
  const Coord s_lo = S_value(b.lower), s_hi = S_value(b.upper);
  const Coord lev_lo = t.lower_level(), lev_hi = t.upper_level();
  if (s_lo >= lev_hi) return separated("S above c s0 on the box");
  if (s_hi <= lev_lo) return separated("S below mu c s0 on the box");
  const Coord lo = std::max(s_lo, lev_lo), hi = std::min(s_hi, lev_hi);
  auto w = bisect_segment(b.lower, b.upper, S_value, lo, hi);
  if (!w) throw Inconclusive("box-simplex witness search failed");
  return meeting(*w, "box meets simplex shell");
}

Relation shell_shell(const SphericalShell& a, const SphericalShell& b) {
  const Coord lo = std::max(a.inner_radius(), b.inner_radius());
  const Coord hi = std::min(a.outer_radius(), b.outer_radius());
  if (lo >= hi) return separated("radial ranges disjoint");
  Point w(static_cast<std::size_t>(a.n), Coord(0));
  w[0] = (lo + hi) / 2;
  return meeting(w, "radial ranges overlap");
}

Relation shell_tail(const SphericalShell& s, const TailRegion& t) {
  const Coord rn = sqrt(Coord(t.n));
  if (s.outer_radius() <= rn * t.R) return separated("tail lies outside radius sqrt(n) R");
  const Coord lo = std::max(Coord(t.R), s.inner_radius() / rn), hi = s.outer_radius() / rn;
  if (lo < hi) return meeting(diagonal(t.n, (lo + hi) / 2), "shell meets tail on the diagonal");
  throw Inconclusive("shell-tail relation undecided");
}

Relation shell_simplex(const SphericalShell& s, const LogSimplexShell& t) {
  const Coord rn = sqrt(Coord(s.n));
  if (min_S(s) >= t.upper_level()) return separated("S exceeds c s0 on the shell's ball");
  // diagonal points -r/sqrt(n) (1,..,1) have S = n e^{-2r/sqrt(n)}
  const Coord n = s.n;
  const Coord r_lo = std::max(s.inner_radius(), rn / 2 * log(n / t.upper_level()));
  const Coord r_hi = std::min(s.outer_radius(), rn / 2 * log(n / t.lower_level()));
  if (r_lo < r_hi) return meeting(diagonal(s.n, -(r_lo + r_hi) / 2 / rn), "shell meets simplex shell");
  throw Inconclusive("shell-simplex relation undecided");
}

Relation tail_tail(const TailRegion& a, const TailRegion& b) {
  return meeting(diagonal(a.n, Coord(std::max(a.R, b.R)) + 1), "tails share the diagonal");
}

Relation tail_simplex(const TailRegion& a, const LogSimplexShell& t) {
  if (min_S(a) >= t.upper_level()) return separated("S exceeds c s0 on the tail");
  const Coord n = a.n;
  const Coord lo = std::max(Coord(a.R), log(t.lower_level() / n) / 2);
  const Coord hi = log(t.upper_level() / n) / 2;
  if (lo < hi) return meeting(diagonal(a.n, (lo + hi) / 2), "tail meets simplex shell");
  throw Inconclusive("tail-simplex relation undecided");
}

Relation simplex_simplex(const LogSimplexShell& a, const LogSimplexShell& b) {
  const Coord lo = std::max(a.lower_level(), b.lower_level());
  const Coord hi = std::min(a.upper_level(), b.upper_level());
  if (lo >= hi) return separated("S level ranges disjoint");
  return meeting(diagonal(a.n, log((lo + hi) / 2 / Coord(a.n)) / 2), "S level ranges overlap");
}

Relation relate_ordered(const Primitive& a, const Primitive& b) {
  if (const auto* c = std::get_if<BoxChainCorridor>(&b)) {
    for (const auto& seg : c->segments) {
      Relation r = relate(a, seg);
      if (!r.disjoint) return r;
    }
    return separated("every corridor segment separated");
  }
  if (const auto* x = std::get_if<AxisBox>(&a)) {
    if (const auto* y = std::get_if<AxisBox>(&b)) return box_box(*x, *y);
    if (const auto* y = std::get_if<SphericalShell>(&b)) return box_shell(*x, *y);
    if (const auto* y = std::get_if<TailRegion>(&b)) return box_tail(*x, *y);
    if (const auto* y = std::get_if<LogSimplexShell>(&b)) return box_simplex(*x, *y);
  }
  if (const auto* x = std::get_if<SphericalShell>(&a)) {
    if (const auto* y = std::get_if<SphericalShell>(&b)) return shell_shell(*x, *y);
    if (const auto* y = std::get_if<TailRegion>(&b)) return shell_tail(*x, *y);
    if (const auto* y = std::get_if<LogSimplexShell>(&b)) return shell_simplex(*x, *y);
  }
  if (const auto* x = std::get_if<TailRegion>(&a)) {
    if (const auto* y = std::get_if<TailRegion>(&b)) return tail_tail(*x, *y);
    if (const auto* y = std::get_if<LogSimplexShell>(&b)) return tail_simplex(*x, *y);
  }
  if (const auto* x = std::get_if<LogSimplexShell>(&a))
    if (const auto* y = std::get_if<LogSimplexShell>(&b)) return simplex_simplex(*x, *y);
  throw Inconclusive("unsupported primitive pair");
}

}  // namespace

Relation relate(const Primitive& a, const Primitive& b) {
  if (dimension(a) != dimension(b)) throw ValidationError("primitives live in different dimensions");
  Relation r = a.index() <= b.index() ? relate_ordered(a, b) : relate_ordered(b, a);
  if (!r.disjoint && !(contains(a, *r.witness) && contains(b, *r.witness)))
    throw Inconclusive("witness point failed membership: " + r.reason);
  return r;
}

DisjointnessReport pairwise_disjoint(std::span<const Primitive> pieces) {
  for (std::size_t i = 0; i < pieces.size(); ++i)
    for (std::size_t j = i + 1; j < pieces.size(); ++j) {
      Relation r = relate(pieces[i], pieces[j]);
      if (!r.disjoint) return DisjointnessReport{false, i, j, r.witness};
    }
  return {};
}

Connectivity connectivity(std::span<const Primitive> pieces) {
  std::vector<std::size_t> parent(pieces.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < pieces.size(); ++i)
    for (std::size_t j = i + 1; j < pieces.size(); ++j) {
      if (find(i) == find(j)) continue;
      if (!relate(pieces[i], pieces[j]).disjoint) parent[find(i)] = find(j);
    }
  Connectivity out;
  out.component.resize(pieces.size());
  std::vector<std::size_t> label(pieces.size(), pieces.size());
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const std::size_t root = find(i);
    if (label[root] == pieces.size()) label[root] = out.count++;
    out.component[i] = label[root];
  }
  return out;
}

}  // namespace bergman
