#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace bergman {

// Solve G(tau) = A0 on the closed ball |tau| <= r by the Newton-like
// iteration tau <- tau - L^-1 (G(tau) - A0) with a frozen model matrix L.
struct BrouwerProblem {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> G;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> DG;
  Eigen::MatrixXd L;
  Eigen::VectorXd A0;
  double r = 0.0;
};

// Evidence that the iteration maps the ball into itself and contracts:
//   lambda |L^-1| <= 1/2        with lambda >= sup |DG - L|
// or the weaker preconditioned form
//   lambda_tilde <= 1/2         with lambda_tilde >= sup |L^-1 DG - I|
// together with offset = |L^-1 (G(0) - A0)| <= r/2.
struct HypothesisRecord {
  double lambda = 0.0;
  double lambda_tilde = 0.0;
  double L_inv_norm = 0.0;
  double offset = 0.0;
  double r = 0.0;
  bool certified = false;  // bounds are certified rather than sampled
  std::size_t samples = 0;

  bool lambda_holds() const { return lambda * L_inv_norm <= 0.5 || lambda_tilde <= 0.5; }
  bool offset_holds() const { return offset <= r / 2.0; }
  bool holds() const { return lambda_holds() && offset_holds(); }
  std::string failing() const;
};

struct IterateRecord {
  int iteration = 0;
  Eigen::VectorXd tau;
  double residual = 0.0;  // |G(tau) - A0|
  double step = 0.0;      // |tau_{k+1} - tau_k|, the preconditioned residual
};

struct SolverReport {
  bool converged = false;
  Eigen::VectorXd tau;
  double residual = 0.0;
  int iterations = 0;
  HypothesisRecord hypotheses;
  std::vector<IterateRecord> log;
  // largest step ratio |s_{k+1}| / |s_k| over steps above the noise floor
  double contraction = 0.0;
};

struct BrouwerOptions {
  double tol = 1e-12;  // absolute residual target
  int max_iter = 200;
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  // supplied by the caller when the bounds are certified analytically;
  // otherwise lambda and lambda_tilde are sampled over the ball
  std::optional<HypothesisRecord> hypotheses;
};

// Throws HypothesisViolated if the record fails, or if an iterate leaves the
// ball; NoConvergence when max_iter is exhausted.
SolverReport brouwer_solve(const BrouwerProblem& problem, const BrouwerOptions& options = {});

// Sampled hypothesis record: uniform points in the ball plus its centre.
HypothesisRecord sample_hypotheses(const BrouwerProblem& problem, std::size_t samples, std::uint64_t seed);

}  // namespace bergman
