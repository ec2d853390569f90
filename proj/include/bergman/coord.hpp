#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <span>
#include <vector>

namespace bergman {

// Extended-precision coordinate. Domain pieces near the tails are thinner
// than e^{-100}, so box bounds and points must resolve offsets far below
// double precision relative to their magnitude. Sums of a few doubles are
// held exactly.
using Coord = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<1024, boost::multiprecision::digit_base_2>,
    boost::multiprecision::et_off>;

using Point = std::vector<Coord>;

double to_double(const Coord& x);

// Splits x into doubles whose exact sum is x (at most `max_terms`, leading
// term first). Used for lossless serialisation.
std::vector<double> split_exact(const Coord& x, int max_terms = 24);
Coord sum_exact(std::span<const double> parts);

Point make_point(std::span<const double> x);
std::vector<double> to_doubles(const Point& p);

// Leading double and the double nearest to the remainder.
struct SplitDouble {
  double hi;
  double lo;
};
SplitDouble split2(const Coord& x);

Coord squared_norm(const Point& p);

}  // namespace bergman
