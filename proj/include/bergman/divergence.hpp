#pragma once

#include <span>
#include <string>

#include "bergman/multi_index.hpp"
#include "bergman/primitives.hpp"

namespace bergman {

// Proof that a monomial weight is not integrable on the domain: an explicit
// positive lower bound whose integral diverges.
struct DivergenceCertificate {
  enum class Kind { tail_growth, simplex_face };

  MultiIndex alpha;
  Kind kind = Kind::tail_growth;
  // tail_growth: integrand >= constant * e^{exponent u} on u > start.
  // simplex_face: integrand >= constant * y^{exponent} on 0 < y < start.
  double constant = 0.0;
  double exponent = 0.0;
  double start = 0.0;
  std::size_t coordinate = 0;  // simplex_face only
  std::string description;

  // Lower bound on the integral over the truncated region (u < cutoff for
  // tails, y > cutoff for faces); grows without bound as the cutoff moves.
  double lower_bound(double cutoff) const;
};

// alpha must lie outside I_m. Uses a TailRegion from `pieces` for alpha in N^n
// with |alpha| >= m+1 and a LogSimplexShell when some entry is <= -1.
DivergenceCertificate divergence_certificate(const MultiIndex& alpha, int m,
                                             std::span<const Primitive> pieces);

}  // namespace bergman
