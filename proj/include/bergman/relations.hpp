#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bergman/primitives.hpp"

namespace bergman {

// Outcome of comparing two open sets: either a separator was proved or a
// common point was found.
struct Relation {
  bool disjoint = false;
  std::optional<Point> witness;  // set when not disjoint
  std::string reason;
};

// Throws Inconclusive when neither a separator nor a witness is found.
Relation relate(const Primitive& a, const Primitive& b);

struct DisjointnessReport {
  bool disjoint = true;
  std::size_t first = 0;
  std::size_t second = 0;
  std::optional<Point> witness;
};

DisjointnessReport pairwise_disjoint(std::span<const Primitive> pieces);

// Components of the overlap graph (edges = nonempty common interior).
struct Connectivity {
  std::vector<std::size_t> component;  // per piece
  std::size_t count = 0;
  bool connected() const { return count == 1; }
};

Connectivity connectivity(std::span<const Primitive> pieces);

}  // namespace bergman
