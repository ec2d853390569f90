#pragma once

#include <span>

#include "bergman/primitive_moment.hpp"

namespace bergman {

// Box enclosing (box ∩ piece) for a curved piece; nullopt when provably empty.
std::optional<AxisBox> clip_to(const AxisBox& box, const Primitive& piece);

struct UnionMoment {
  CertifiedMoment moment;
  std::size_t fragments = 0;  // disjoint boxes after merging all box pieces
  double overlap_bound = 0.0; // norm of the curved/box overlap enclosure
};

// Moment of the union. Boxes (including corridor segments) are merged
// exactly; curved pieces must be pairwise disjoint, and their overlap with
// boxes is enclosed by clipped boxes and charged to the error.
UnionMoment union_moment(std::span<const Primitive> pieces, const IndexSet& idx,
                         double budget = kNoBudget, int shell_order = 4);

}  // namespace bergman
