#pragma once

#include <string>
#include <vector>

#include "bergman/decomposition.hpp"

namespace bergman {

// How the variable box W_j(t) grows with t.
//   one_sided: p_j + [0, t/sigma) x Q
//   centered:  p_j + (-t/(2 sigma), t/(2 sigma)) x Q
// Both have volume t; centered keeps the box closer to p_j.
enum class Growth { one_sided, centered };

std::string growth_name(Growth g);
Growth parse_growth(const std::string& s);

// A scalar inequality value <= bound that the construction relies on.
struct Condition {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct RunParameters {
  int m = 1;
  int n = 2;
  double c = 1e-2;
  double mu = 0.5;
  double beta = 0.5;
  Growth growth = Growth::centered;

  std::size_t N = 0;  // number of moments = number of pivots
  std::size_t M = 0;  // number of decomposition points

  double eps = 0.0;     // c^beta, half-side of the cross-section Q
  double sigma = 0.0;   // (2 eps)^{n-1}, area of Q
  double delta = 0.0;   // c^2, anchor box scale
  double rho = 0.0;     // ball radius around each point
  double max_point_norm = 0.0;
  double radius_b1 = 0.0;
  double radius_b2 = 0.0;
  double kappa1 = 0.0;  // bound on sup |v| over the closed ball B2
  double kappa2 = 0.0;  // sup of entrywise |grad v_alpha| over B2
  double s = 0.0;       // min of S over B2
  double s0 = 0.0;      // min(s/2, 1/N)
  double a_star = 0.0;  // 2 max a_j
  double r_c = 0.0;     // (c/2) min over pivots a_j
  std::vector<double> t0;  // c a_j

  double lambda_hat = 0.0;  // entrywise Jacobian deviation bound
  double lambda_c = 0.0;    // N lambda_hat

  std::vector<Condition> conditions;

  bool conditions_hold() const;
  // name of the first failing condition, empty if none
  std::string first_failure() const;
};

double default_beta(int n);

// Derived quantities for a run. Throws ValidationError for n < 2, m < 1,
// c or mu outside (0,1) or beta outside (0, 1/(n-1)).
RunParameters derive_run_parameters(int m, int n, double c, double mu, const ConeDecomposition& dec,
                                    double beta = 0.0, Growth growth = Growth::centered);

// Smallest pairwise distance between decomposition points.
double min_pairwise_distance(const std::vector<std::vector<double>>& points);

}  // namespace bergman
