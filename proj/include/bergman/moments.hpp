#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "bergman/multi_index.hpp"

namespace bergman {

// Values indexed by the canonical ordering of an IndexSet.
using MomentVector = Eigen::VectorXd;

struct LogMomentVector {
  Eigen::VectorXd log_values;

  // Throws OverflowError if an entry does not fit in a double.
  MomentVector exp() const;
};

MomentVector target_moment_vector(const IndexSet& idx);

// v_alpha(x) = exp(2 <alpha + 1, x>)
MomentVector exp_moment_vector(const IndexSet& idx, std::span<const double> x);
LogMomentVector log_exp_moment_vector(const IndexSet& idx, std::span<const double> x);

double density_rho(int m, int n, std::span<const double> x);

// log of (e^x - 1) for x > 0 without cancellation or overflow.
double log_expm1(double x);

// log of the integral of e^{k s} over [a, a + width], with a = a_hi + a_lo
// split so that very thin intervals far from the origin stay accurate.
double log_exp_integral(double k, double a_hi, double a_lo, double width);

// Exponential moments of the box [lower, upper]; degenerate boxes give 0.
MomentVector box_moment(const IndexSet& idx, std::span<const double> lower,
                        std::span<const double> upper);
LogMomentVector log_box_moment(const IndexSet& idx, std::span<const double> lower,
                               std::span<const double> upper);

// Sum in log space.
double log_sum_exp(double a, double b);

}  // namespace bergman
