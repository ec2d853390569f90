#pragma once

#include <string>
#include <vector>

#include "bergman/decomposition.hpp"
#include "bergman/divergence.hpp"
#include "bergman/primitive_moment.hpp"
#include "bergman/run_parameters.hpp"

namespace bergman {

// Moment norm of one background piece against its allowance.
struct BudgetEntry {
  std::string piece;
  double norm = 0.0;
  double error = 0.0;
  double budget = 0.0;  // allowance from the construction (multiple of c^2)
  double cap = 0.0;     // tighter target used when the piece can be shrunk
  bool pass = false;
};

struct AssemblyConfig {
  // moment cap for each shrinkable piece, relative to |cA|
  double cap_fraction = 1e-10;
};

// The fixed part of the domain: hub shell, tail, corridor to the tail,
// log-simplex shell, corridor to it, and the skeleton (anchors plus paths
// from every anchor to the hub).
struct AssembledBackground {
  RunParameters params;
  SphericalShell hub;
  TailRegion tail;
  LogSimplexShell simplex;
  BoxChainCorridor tail_corridor;
  BoxChainCorridor simplex_corridor;
  std::vector<AxisBox> anchors;
  std::vector<BoxChainCorridor> skeleton;

  CertifiedMoment moment;  // of the union
  std::size_t fragments = 0;
  std::vector<BudgetEntry> budget_report;
  std::vector<DivergenceCertificate> certificates;  // all |alpha| = m+1
  bool connected = false;

  std::vector<Primitive> primitives() const;
  bool budgets_hold() const;
};

// Smallest R on a 1/4 grid with the tail outside B2 and the bracket's upper
// moment bound at most `cap`.
double choose_tail_threshold(const RunParameters& p, double cap);

// Midradius of the hub shell. Corridors aim at exactly this value.
double hub_radius(const RunParameters& p);

// Shell midway between B1 and B2, thinned by bisection until its certified
// moment norm is at most `cap`.
SphericalShell build_hub_shell(const RunParameters& p, const IndexSet& idx, double cap);

// p + (-4d, 4d) x (eps - 4d, eps + 4d) x (-eps, eps)^{n-2}, d = delta
AxisBox anchor_box(const RunParameters& p, const std::vector<double>& point);

BoxChainCorridor route_tail_corridor(const RunParameters& p, const TailRegion& tail,
                                     const IndexSet& idx, double cap);
BoxChainCorridor route_simplex_corridor(const RunParameters& p, const LogSimplexShell& simplex,
                                        const IndexSet& idx, double cap);
// Path from the anchor of point j to the hub, avoiding the balls of the
// other points.
BoxChainCorridor route_skeleton(const RunParameters& p, const ConeDecomposition& dec, std::size_t j,
                                const IndexSet& idx, double cap);

AssembledBackground build_background(const RunParameters& p, const ConeDecomposition& dec,
                                     const AssemblyConfig& config = {});

}  // namespace bergman
