#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bergman/assembly.hpp"
#include "bergman/brouwer.hpp"
#include "bergman/moment_map.hpp"

namespace bergman {

// A solved domain: the background plus one box W_j per decomposition point.
struct ConstructedDomain {
  RunParameters params;
  ConeDecomposition decomposition;
  AssembledBackground background;
  Eigen::VectorXd tau_star;
  std::vector<double> times;   // t_j for every point
  std::vector<AxisBox> boxes;  // W_j(t_j)
  // |Psi(tau*) - cA| from the solver and the certified background error
  double solver_residual = 0.0;
  double certified_error = 0.0;

  double c() const { return params.c; }
  double mu() const { return params.mu; }
  std::vector<Primitive> primitives() const;
};

struct ConstructConfig {
  int m = 1;
  int n = 2;
  double c_initial = 1e-2;
  double c_floor = 1e-8;
  double mu = 0.5;
  double beta = 0.0;  // 0 selects 1/n
  std::uint64_t seed = 1;
  double tol_rel = 1e-12;  // solver tolerance relative to |cA|
  int max_iter = 200;
  Growth growth = Growth::centered;
  std::optional<ConeDecomposition> decomposition;  // skips fitting when set
  AssemblyConfig assembly;
};

// One rejected value of c and why.
struct Attempt {
  double c = 0.0;
  std::string failure;
};

struct ConstructResult {
  ConstructedDomain domain;
  SolverReport report;
  CertifiedHypotheses hypotheses;
  std::vector<Attempt> attempts;
  double accepted_c = 0.0;
};

// Throws ValidationError when the config violates a precondition.
void validate_config(const ConstructConfig& config);

// Decomposition whose pivots maximise the predicted largest admissible c.
ConeDecomposition fit_decomposition(const ConstructConfig& config);

// Halves c from c_initial until every hypothesis holds, then solves
// Psi_c(tau) = cA by the fixed-point iteration. Throws ValidationError on bad
// input and GiveUp once c drops below c_floor.
ConstructResult construct_domain(const ConstructConfig& config);

}  // namespace bergman
