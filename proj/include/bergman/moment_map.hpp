#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bergman/assembly.hpp"

namespace bergman {

// The boxes W_j(t) of volume t attached to each decomposition point, with
// closed-form moments. Pivot j < N moves with tau_j; the rest stay at c a_j.
class VariableBoxFamily {
 public:
  VariableBoxFamily(const RunParameters& params, const ConeDecomposition& dec);

  const RunParameters& params() const { return params_; }
  std::size_t size() const { return points_.size(); }

  AxisBox box(std::size_t j, double t) const;
  AxisBox anchor(std::size_t j) const;
  // t_j = c a_j + tau_j for pivots, c a_j otherwise
  Eigen::VectorXd times(const Eigen::VectorXd& tau) const;
  // admissible range of t_j over the closed ball of radius r_c
  double t_min(std::size_t j) const;
  double t_max(std::size_t j) const;

  // int_{W_j(t)} v, and that minus t v(p_j) computed without cancellation
  MomentVector moment(std::size_t j, double t) const;
  MomentVector excess(std::size_t j, double t) const;
  // d/dt of the moment, and that minus v(p_j)
  MomentVector derivative(std::size_t j, double t) const;
  MomentVector derivative_excess(std::size_t j, double t) const;
  // exact moment of U_j ∩ W_j(t), independent of t on the admissible range
  const MomentVector& anchor_overlap(std::size_t j) const { return overlap_[j]; }
  const MomentVector& point_moment(std::size_t j) const { return v_[j]; }

 private:
  RunParameters params_;
  IndexSet idx_;
  std::vector<std::vector<double>> points_;
  Eigen::VectorXd weights_;
  std::vector<MomentVector> v_;
  std::vector<MomentVector> overlap_;
  Eigen::MatrixXd k_;  // k_(i, d) = 2 (alpha_i + 1)_d
  Eigen::VectorXd cross_section_m1_;  // prod_{d>=1} sinhc(k_d eps) - 1
};

// Sufficient conditions for the fixed-point iteration on the ball of radius
// r = r_c, certified rather than sampled:
//   lambda_tilde >= sup |L^-1 DPsi - I| over the ball, must be <= 1/2
//   offset       >= |L^-1 (Psi(0) - cA)| including certified errors, <= r/2
struct CertifiedHypotheses {
  double r = 0.0;
  double lambda_tilde = 0.0;
  double offset = 0.0;
  double background_error = 0.0;
  double L_inv_norm = 0.0;
  double lambda_hat = 0.0;   // entrywise Jacobian deviation bound (informational)
  double lambda_c = 0.0;     // N lambda_hat
  bool closed_form_lambda_holds = false;  // lambda_c |L^-1| <= 1/2
  bool lambda_holds = false;
  bool offset_holds = false;

  bool holds() const { return lambda_holds && offset_holds; }
  std::string failing() const;
};

// `background` may be empty (zero) to obtain the cheap analytic prediction
// used before any geometry is built.
CertifiedHypotheses certify_hypotheses(const VariableBoxFamily& family, const ConeDecomposition& dec,
                                       const CertifiedMoment* background);

// Largest c (log scale, to 1%) at which the analytic hypotheses and the
// smallness conditions hold for this decomposition; -inf if none >= c_floor.
double predicted_log_cmax(const ConeDecomposition& dec, double mu, double beta, Growth growth,
                          double c_floor = 1e-12);

// Psi(tau) = background + sum_j (W_j(t_j) minus its overlap with U_j).
class MomentMap {
 public:
  MomentMap(const AssembledBackground& background, const ConeDecomposition& dec);

  const VariableBoxFamily& family() const { return family_; }
  const AssembledBackground& background() const { return *background_; }

  MomentVector operator()(const Eigen::VectorXd& tau) const;
  // Psi(tau) - cA, accurate when the two nearly cancel
  MomentVector residual(const Eigen::VectorXd& tau) const;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& tau) const;
  const Eigen::MatrixXd& model() const { return L_; }
  const MomentVector& target() const { return cA_; }

  // Exact disjointness of every W_j(t_max) from the rest of the domain and
  // constancy of U_j ∩ W_j(t). Empty when all hold; otherwise descriptions.
  std::vector<std::string> geometry_failures() const;

  std::vector<Primitive> domain_primitives(const Eigen::VectorXd& tau) const;

 private:
  void check_domain(const Eigen::VectorXd& t) const;

  const AssembledBackground* background_;
  VariableBoxFamily family_;
  Eigen::MatrixXd L_;
  MomentVector cA_;
  MomentVector fixed_part_;  // background - overlaps + (sum c a_j v_j - cA)
};

}  // namespace bergman
