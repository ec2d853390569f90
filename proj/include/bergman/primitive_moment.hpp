#pragma once

#include <limits>
#include <span>

#include "bergman/moments.hpp"
#include "bergman/primitives.hpp"

namespace bergman {

// Moment vector with an entrywise bound on |exact - value|.
struct CertifiedMoment {
  MomentVector value;
  MomentVector error;

  static CertifiedMoment zero(std::size_t size);
  double error_norm() const { return error.norm(); }
  CertifiedMoment& operator+=(const CertifiedMoment& other);
};

constexpr double kNoBudget = std::numeric_limits<double>::infinity();

// Throws BudgetExceeded when the certified error norm cannot be brought
// below `budget`.
// Shell quadrature starts at `shell_order` radial nodes and refines from there.
CertifiedMoment primitive_moment(const Primitive& p, const IndexSet& idx,
                                 double budget = kNoBudget, int shell_order = 4);

CertifiedMoment box_moment_certified(const AxisBox& b, const IndexSet& idx);
CertifiedMoment shell_moment(const SphericalShell& s, const IndexSet& idx,
                             double budget = kNoBudget, int shell_order = 4);
CertifiedMoment tail_moment(const TailRegion& t, const IndexSet& idx);
CertifiedMoment simplex_shell_moment(const LogSimplexShell& t, const IndexSet& idx);
CertifiedMoment corridor_moment(const BoxChainCorridor& c, const IndexSet& idx);

// log of the integral of e^{<b, theta>} over the unit sphere for |b| = z.
double log_sphere_exp_integral(int n, double z);

// (n-1)-volume of {u in (-1,1)^{n-1} : |u_1 + ... + u_{n-1}| < 1}.
double tail_section_volume(int n);

// Bracket C~ int_R^inf e^{2(|a|-m-1)u} du < moment < C int_R^inf ... with
// C~ = e^{-b} n V0, C = e^{b} n V0, b = 2(|alpha|+n). Only |alpha| <= m.
struct TailBracket {
  double lower_constant;
  double upper_constant;
  double lower;
  double upper;
};
TailBracket tail_bracket(const MultiIndex& alpha, int m, const TailRegion& t);

}  // namespace bergman
