#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bergman/coord.hpp"

namespace bergman {

// Open box (lower, upper). Bounds are extended precision so that boxes
// hugging a thin shell or a far tail keep their exact extent.
struct AxisBox {
  Point lower;
  Point upper;

  std::size_t dim() const { return lower.size(); }
  // true when some side has zero or negative length
  bool empty() const;
  Point center() const;
};

AxisBox make_box(std::span<const double> lower, std::span<const double> upper);
// Cube of half-width h around c.
AxisBox cube(const Point& c, const Coord& h);

// Open annulus r1 < |x| < r2. Stored as midpoint and width because hub
// shells are far thinner than a double ulp at their radius.
struct SphericalShell {
  int n = 2;
  double r_mid = 0.0;
  double width = 0.0;

  Coord inner_radius() const;
  Coord outer_radius() const;
};

SphericalShell shell_from_radii(int n, double r1, double r2);

// {x : t > R, |x_j - t| < e^{-gamma t}}, t the mean of the coordinates.
struct TailRegion {
  int n = 2;
  double R = 2.0;
  double gamma = 1.0;
};

// gamma = 2(m+n+1)/(n-1)
double tail_gamma(int m, int n);

// {x : mu c s0 < S(x) < c s0}, S(x) = sum_j e^{2 x_j}.
struct LogSimplexShell {
  int n = 2;
  double mu = 0.5;
  double c = 1.0;
  double s0 = 1.0;

  Coord lower_level() const;  // mu c s0
  Coord upper_level() const;  // c s0
};

// Chain of boxes, consecutive ones overlapping.
struct BoxChainCorridor {
  std::string name;
  std::vector<AxisBox> segments;
  Point entry;
  Point exit;
};

using Primitive =
    std::variant<AxisBox, SphericalShell, TailRegion, LogSimplexShell, BoxChainCorridor>;

std::string kind_name(const Primitive& p);
int dimension(const Primitive& p);

// Throws ValidationError when the defining invariants fail. m is needed to
// check the tail decay rate.
void validate(const Primitive& p, int m);

bool contains(const Primitive& p, const Point& x);
bool contains(const Primitive& p, std::span<const double> x);

Coord S_value(const Point& x);

// Infimum of S over the primitive (or over a finite union).
Coord min_S(const Primitive& p);
Coord min_S(std::span<const Primitive> pieces);

}  // namespace bergman
