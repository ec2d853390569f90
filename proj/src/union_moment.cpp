#include "bergman/union_moment.hpp"

#include <algorithm>

#include "bergman/box_ops.hpp"
#include "bergman/errors.hpp"
#include "bergman/relations.hpp"

namespace bergman {

namespace {

// Narrows axis k of the box to the hull of {x_k : lo_sq < x_k^2 < hi_sq}.
bool clip_square(AxisBox& b, std::size_t k, const Coord& lo_sq, const Coord& hi_sq) {
  if (hi_sq <= 0) return false;
  const Coord outer = sqrt(hi_sq);
  const Coord inner = lo_sq > 0 ? sqrt(lo_sq) : Coord(0);
  Coord& l = b.lower[k];
  Coord& u = b.upper[k];
  // allowed set (-outer, -inner) U (inner, outer)
  const bool neg = l < -inner && u > -outer;
  const bool pos = u > inner && l < outer;
  if (!neg && !pos) return false;
  const Coord new_l = neg ? std::max(l, -outer) : std::max(l, inner);
  const Coord new_u = pos ? std::min(u, outer) : std::min(u, -inner);
  l = new_l;
  u = new_u;
  return l < u;
}

std::optional<AxisBox> clip_shell(AxisBox b, const SphericalShell& s) {
  const Coord r1 = s.inner_radius(), r2 = s.outer_radius();
  for (std::size_t k = 0; k < b.dim(); ++k) {
    Coord rest_min = 0, rest_max = 0;
    for (std::size_t i = 0; i < b.dim(); ++i) {
      if (i == k) continue;
      AxisBox axis{{b.lower[i]}, {b.upper[i]}};
      rest_min += min_squared_norm(axis);
      rest_max += max_squared_norm(axis);
    }
    if (!clip_square(b, k, r1 * r1 - rest_max, r2 * r2 - rest_min)) return std::nullopt;
  }
  return b;
}

std::optional<AxisBox> clip_tail(AxisBox b, const TailRegion& t) {
  const int n = t.n;
  Coord sum_lo = 0, sum_hi = 0, max_lo = b.lower[0], min_hi = b.upper[0];
  for (std::size_t k = 0; k < b.dim(); ++k) {
    sum_lo += b.lower[k];
    sum_hi += b.upper[k];
    max_lo = std::max(max_lo, b.lower[k]);
    min_hi = std::min(min_hi, b.upper[k]);
  }
  Coord t_lo = std::max(Coord(t.R), sum_lo / n);
  const Coord w = exp(-Coord(t.gamma) * t_lo);
  t_lo = std::max(t_lo, max_lo - w);
  const Coord t_hi = std::min(sum_hi / n, min_hi + w);
  if (!(t_lo < t_hi)) return std::nullopt;
  for (std::size_t k = 0; k < b.dim(); ++k) {
    b.lower[k] = std::max(b.lower[k], t_lo - w);
    b.upper[k] = std::min(b.upper[k], t_hi + w);
    if (!(b.lower[k] < b.upper[k])) return std::nullopt;
  }
  return b;
}

std::optional<AxisBox> clip_simplex(AxisBox b, const LogSimplexShell& t) {
  const Coord top = t.upper_level(), bottom = t.lower_level();
  for (std::size_t k = 0; k < b.dim(); ++k) {
    Coord rest_lo = 0, rest_hi = 0;
    for (std::size_t i = 0; i < b.dim(); ++i) {
      if (i == k) continue;
      rest_lo += exp(2 * b.lower[i]);
      rest_hi += exp(2 * b.upper[i]);
    }
    // e^{2 x_k} < top - rest_lo and e^{2 x_k} > bottom - rest_hi
    const Coord room = top - rest_lo;
    if (room <= 0) return std::nullopt;
    b.upper[k] = std::min(b.upper[k], log(room) / 2);
    const Coord need = bottom - rest_hi;
    if (need > 0) b.lower[k] = std::max(b.lower[k], log(need) / 2);
    if (!(b.lower[k] < b.upper[k])) return std::nullopt;
  }
  return b;
}

}  // namespace

std::optional<AxisBox> clip_to(const AxisBox& box, const Primitive& piece) {
  if (box.empty()) return std::nullopt;
  if (const auto* s = std::get_if<SphericalShell>(&piece)) return clip_shell(box, *s);
  if (const auto* t = std::get_if<TailRegion>(&piece)) return clip_tail(box, *t);
  if (const auto* t = std::get_if<LogSimplexShell>(&piece)) return clip_simplex(box, *t);
  if (const auto* b = std::get_if<AxisBox>(&piece)) return intersect(box, *b);
  throw ValidationError("clip_to expects a single piece");
}

UnionMoment union_moment(std::span<const Primitive> pieces, const IndexSet& idx, double budget,
                         int shell_order) {
  std::vector<AxisBox> boxes;
  std::vector<Primitive> curved;
  for (const auto& p : pieces) {
    if (const auto* b = std::get_if<AxisBox>(&p)) boxes.push_back(*b);
    else if (const auto* c = std::get_if<BoxChainCorridor>(&p))
      boxes.insert(boxes.end(), c->segments.begin(), c->segments.end());
    else curved.push_back(p);
  }
  if (!pairwise_disjoint(curved).disjoint)
    throw DomainViolation("curved pieces of a union must be pairwise disjoint");

  UnionMoment out;
  out.moment = CertifiedMoment::zero(idx.size());
  const double share = budget / std::max<std::size_t>(1, curved.size());
  for (const auto& p : curved) out.moment += primitive_moment(p, idx, share, shell_order);

  const auto fragments = disjointify(boxes);
  out.fragments = fragments.size();
  MomentVector overlap = MomentVector::Zero(idx.size());
  for (const auto& f : fragments) {
    out.moment += box_moment_certified(f, idx);
    for (const auto& p : curved)
      if (auto clipped = clip_to(f, p)) overlap += box_moment(idx, *clipped);
  }
  // union = sum - (overlaps), each overlap in [0, its enclosure]
  out.moment.value -= overlap / 2.0;
  out.moment.error += overlap / 2.0;
  out.overlap_bound = overlap.norm();
  if (out.moment.error_norm() > budget) throw BudgetExceeded("union moment error exceeds its budget");
  return out;
}

}  // namespace bergman
