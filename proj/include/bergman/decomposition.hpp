#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bergman/moments.hpp"
#include "bergman/quadrature.hpp"

namespace bergman {

// A = sum_j a_j v(p_j) with a_j > 0. After pivot selection the first N points
// are the pivots and L holds their columns.
struct ConeDecomposition {
  int m = 0;
  int n = 0;
  std::vector<std::vector<double>> points;
  Eigen::VectorXd weights;
  // pivot_order[k] is the index, in the fitted order, of the point now at k
  std::vector<std::size_t> pivot_order;
  Eigen::MatrixXd L;
  double L_inv_norm = 0.0;
  double condition = 0.0;
  // strict-positivity shift t added to the pivot weights (normalised scale)
  double strict_margin = 0.0;

  std::size_t size() const { return points.size(); }
  Eigen::MatrixXd columns(const IndexSet& idx) const;
  MomentVector reconstruct(const IndexSet& idx) const;
};

using DecompositionScore = std::function<double(const ConeDecomposition&)>;

// Default score: -log cond(L).
double condition_score(const ConeDecomposition& dec);

struct DecompositionConfig {
  std::uint64_t seed = 1;
  int cubature_order = 0;        // 0 selects m + 2
  int importance_samples = -1;   // -1 selects the cubature pool size
  int random_subsets = 300;
  int swap_rounds = 1;
  double residual_tol = 1e-10;
  DecompositionScore score;      // empty selects condition_score
};

// Positive cubature of the density rho against v: nodes x_i and weights w_i
// with sum w_i v_alpha(x_i) equal to the rho-moments for |alpha| <= m.
struct CandidatePool {
  std::vector<std::vector<double>> points;
  std::vector<double> cubature_weights;  // empty for sampled points
};
CandidatePool density_cubature(int m, int n, int order);

// Seeded samples from the probability density rho v_0 / A_0.
std::vector<std::vector<double>> density_samples(int m, int n, int count, std::uint64_t seed);

ConeDecomposition decompose(const MomentVector& target, const IndexSet& idx,
                            const DecompositionConfig& config = {});

// Fit restricted to a candidate list; throws CandidateExhausted when no
// strictly positive fit exists at tolerance.
ConeDecomposition decompose_from_pool(const MomentVector& target, const IndexSet& idx,
                                      const std::vector<std::vector<double>>& pool,
                                      const DecompositionConfig& config = {});

// Greedy column-pivoted QR on normalised columns; reorders the points so the
// chosen pivots come first and fills L, ||L^-1|| and cond(L).
ConeDecomposition select_pivot_basis(const ConeDecomposition& dec);

// Reorders so that the listed fitted-order indices come first.
ConeDecomposition with_pivots(const ConeDecomposition& dec, const std::vector<std::size_t>& pivots);

struct DecompositionReport {
  bool pass = false;
  double residual = 0.0;  // relative
  double min_weight = 0.0;
  double condition = 0.0;
  double L_inv_norm = 0.0;
  double inverse_error = 0.0;  // max |L L^-1 - I|
  int rank = 0;
  std::vector<std::string> failures;
};

DecompositionReport verify_decomposition(const ConeDecomposition& dec, const MomentVector& target,
                                         double tol = 1e-10);

}  // namespace bergman
