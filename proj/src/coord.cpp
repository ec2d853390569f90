#include "bergman/coord.hpp"

#include "bergman/errors.hpp"

namespace bergman {

double to_double(const Coord& x) { return x.convert_to<double>(); }

std::vector<double> split_exact(const Coord& x, int max_terms) {
  std::vector<double> parts;
  Coord rest = x;
  while (rest != 0) {
    if (static_cast<int>(parts.size()) == max_terms)
      throw ValidationError("coordinate is not a short sum of doubles");
    const double d = to_double(rest);
    parts.push_back(d);
    rest -= d;
  }
  if (parts.empty()) parts.push_back(0.0);
  return parts;
}

Coord sum_exact(std::span<const double> parts) {
  Coord s = 0;
  for (double d : parts) s += d;
  return s;
}

Point make_point(std::span<const double> x) { return Point(x.begin(), x.end()); }

std::vector<double> to_doubles(const Point& p) {
  std::vector<double> out;
  out.reserve(p.size());
  for (const auto& c : p) out.push_back(to_double(c));
  return out;
}

SplitDouble split2(const Coord& x) {
  const double hi = to_double(x);
  return {hi, to_double(x - hi)};
}

Coord squared_norm(const Point& p) {
  Coord s = 0;
  for (const auto& c : p) s += c * c;
  return s;
}

}  // namespace bergman
