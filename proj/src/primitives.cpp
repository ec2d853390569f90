#include "bergman/primitives.hpp"

#include <algorithm>
#include <cmath>

#include "bergman/box_ops.hpp"
#include "bergman/errors.hpp"

namespace bergman {

namespace {

template <class... F>
struct overloaded : F... {
  using F::operator()...;
};

bool in_box(const AxisBox& b, const Point& x) {
  for (std::size_t k = 0; k < b.dim(); ++k)
    if (!(b.lower[k] < x[k] && x[k] < b.upper[k])) return false;
  return true;
}

void check_dim(const Primitive& p, std::size_t got) {
  if (static_cast<std::size_t>(dimension(p)) != got)
    throw ValidationError("point dimension does not match primitive");
}

}  // namespace

bool AxisBox::empty() const {
  for (std::size_t k = 0; k < dim(); ++k)
    if (!(lower[k] < upper[k])) return true;
  return false;
}

Point AxisBox::center() const {
  Point c(dim());
  for (std::size_t k = 0; k < dim(); ++k) c[k] = (lower[k] + upper[k]) / 2;
  return c;
}

AxisBox make_box(std::span<const double> lower, std::span<const double> upper) {
  if (lower.size() != upper.size()) throw ValidationError("box corner dimensions differ");
  return AxisBox{make_point(lower), make_point(upper)};
}

AxisBox cube(const Point& c, const Coord& h) {
  AxisBox b{c, c};
  for (std::size_t k = 0; k < c.size(); ++k) {
    b.lower[k] -= h;
    b.upper[k] += h;
  }
  return b;
}

Coord SphericalShell::inner_radius() const { return Coord(r_mid) - Coord(width) / 2; }
Coord SphericalShell::outer_radius() const { return Coord(r_mid) + Coord(width) / 2; }

SphericalShell shell_from_radii(int n, double r1, double r2) {
  return SphericalShell{n, (r1 + r2) / 2.0, r2 - r1};
}

double tail_gamma(int m, int n) { return 2.0 * (m + n + 1) / (n - 1); }

Coord LogSimplexShell::lower_level() const { return Coord(mu) * Coord(c) * Coord(s0); }
Coord LogSimplexShell::upper_level() const { return Coord(c) * Coord(s0); }

std::string kind_name(const Primitive& p) {
  return std::visit(overloaded{
                        [](const AxisBox&) { return std::string("box"); },
                        [](const SphericalShell&) { return std::string("shell"); },
                        [](const TailRegion&) { return std::string("tail"); },
                        [](const LogSimplexShell&) { return std::string("log_simplex_shell"); },
                        [](const BoxChainCorridor&) { return std::string("corridor"); },
                    },
                    p);
}

int dimension(const Primitive& p) {
  return std::visit(overloaded{
                        [](const AxisBox& b) { return static_cast<int>(b.dim()); },
                        [](const SphericalShell& s) { return s.n; },
                        [](const TailRegion& t) { return t.n; },
                        [](const LogSimplexShell& t) { return t.n; },
                        [](const BoxChainCorridor& c) {
                          return c.segments.empty() ? 0 : static_cast<int>(c.segments[0].dim());
                        },
                    },
                    p);
}

void validate(const Primitive& p, int m) {
  std::visit(overloaded{
                 [](const AxisBox& b) {
                   if (b.lower.size() != b.upper.size() || b.lower.empty())
                     throw ValidationError("box corners have mismatched dimension");
                   for (std::size_t k = 0; k < b.dim(); ++k)
                     if (b.upper[k] < b.lower[k]) throw ValidationError("box with lower > upper");
                 },
                 [](const SphericalShell& s) {
                   if (s.n < 2) throw ValidationError("shell dimension must be >= 2");
                   if (!(s.width > 0.0) || !(s.inner_radius() > 0))
                     throw ValidationError("shell needs 0 < r1 < r2");
                 },
                 [m](const TailRegion& t) {
                   if (t.n < 2) throw ValidationError("tail dimension must be >= 2");
                   if (!(t.R > 1.0)) throw ValidationError("tail threshold must exceed 1");
                   if (t.gamma != tail_gamma(m, t.n))
                     throw ValidationError("tail decay rate does not match (m, n)");
                 },
                 [](const LogSimplexShell& t) {
                   if (t.n < 2) throw ValidationError("simplex shell dimension must be >= 2");
                   if (!(t.mu > 0.0 && t.mu < 1.0)) throw ValidationError("mu must lie in (0,1)");
                   if (!(t.c > 0.0 && t.s0 > 0.0)) throw ValidationError("c and s0 must be positive");
                 },
                 [m](const BoxChainCorridor& c) {
                   if (c.segments.empty()) throw ValidationError("corridor has no segments");
                   for (const auto& b : c.segments) validate(b, m);
                   for (std::size_t i = 1; i < c.segments.size(); ++i)
                     if (!intersect(c.segments[i - 1], c.segments[i]))
                       throw ValidationError("corridor '" + c.name + "' has a gap after segment " +
                                             std::to_string(i - 1));
                 },
             },
             p);
}

Coord S_value(const Point& x) {
  Coord s = 0;
  for (const auto& xi : x) s += exp(2 * xi);
  return s;
}

bool contains(const Primitive& p, const Point& x) {
  check_dim(p, x.size());
  return std::visit(overloaded{
                        [&](const AxisBox& b) { return in_box(b, x); },
                        [&](const SphericalShell& s) {
                          const Coord r2 = squared_norm(x);
                          const Coord a = s.inner_radius(), b = s.outer_radius();
                          return a * a < r2 && r2 < b * b;
                        },
                        [&](const TailRegion& tail) {
                          Coord t = 0;
                          for (const auto& xi : x) t += xi;
                          t /= static_cast<int>(x.size());
                          if (!(t > tail.R)) return false;
                          const Coord w = exp(-Coord(tail.gamma) * t);
                          for (const auto& xi : x)
                            if (!(abs(xi - t) < w)) return false;
                          return true;
                        },
                        [&](const LogSimplexShell& t) {
                          const Coord s = S_value(x);
                          return t.lower_level() < s && s < t.upper_level();
                        },
                        [&](const BoxChainCorridor& c) {
                          return std::any_of(c.segments.begin(), c.segments.end(),
                                             [&](const AxisBox& b) { return in_box(b, x); });
                        },
                    },
                    p);
}

bool contains(const Primitive& p, std::span<const double> x) { return contains(p, make_point(x)); }

Coord min_S(const Primitive& p) {
  return std::visit(
      overloaded{
          [](const AxisBox& b) { return S_value(b.lower); },
          [](const SphericalShell& s) {
            // S is convex and symmetric, so over the ball of radius r2 the
            // minimum sits at x_j = -r2/sqrt(n) for all j
            const Coord rn = sqrt(Coord(s.n));
            return Coord(s.n) * exp(-2 * s.outer_radius() / rn);
          },
          [](const TailRegion& t) {
            // Jensen: S(x) >= n e^{2t} > n e^{2R}
            return Coord(t.n) * exp(2 * Coord(t.R));
          },
          [](const LogSimplexShell& t) { return t.lower_level(); },
          [](const BoxChainCorridor& c) {
            Coord best = S_value(c.segments.at(0).lower);
            for (const auto& b : c.segments) best = std::min(best, S_value(b.lower));
            return best;
          },
      },
      p);
}

Coord min_S(std::span<const Primitive> pieces) {
  if (pieces.empty()) throw ValidationError("min_S of an empty union");
  Coord best = min_S(pieces[0]);
  for (const auto& p : pieces) best = std::min(best, min_S(p));
  return best;
}

}  // namespace bergman
