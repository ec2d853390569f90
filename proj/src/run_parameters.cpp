#include "bergman/run_parameters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bergman/errors.hpp"

namespace bergman {

namespace {

double norm(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

Condition condition(std::string name, double value, double bound) {
  return {std::move(name), value, bound, value <= bound};
}

}  // namespace

std::string growth_name(Growth g) { return g == Growth::centered ? "centered" : "one_sided"; }

Growth parse_growth(const std::string& s) {
  if (s == "centered") return Growth::centered;
  if (s == "one_sided") return Growth::one_sided;
  throw ValidationError("unknown growth mode '" + s + "'");
}

bool RunParameters::conditions_hold() const {
  return std::all_of(conditions.begin(), conditions.end(), [](const Condition& c) { return c.pass; });
}

std::string RunParameters::first_failure() const {
  for (const auto& c : conditions)
    if (!c.pass) return c.name;
  return {};
}

double default_beta(int n) { return 1.0 / n; }

double min_pairwise_distance(const std::vector<std::vector<double>>& points) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < points[i].size(); ++k)
        s += (points[i][k] - points[j][k]) * (points[i][k] - points[j][k]);
      best = std::min(best, std::sqrt(s));
    }
  return best;
}

RunParameters derive_run_parameters(int m, int n, double c, double mu, const ConeDecomposition& dec,
                                    double beta, Growth growth) {
  if (n < 2) throw ValidationError("n must be >= 2");
  if (m < 1) throw ValidationError("m must be >= 1");
  if (!(c > 0.0 && c < 1.0)) throw ValidationError("c must lie in (0,1)");
  if (!(mu > 0.0 && mu < 1.0)) throw ValidationError("mu must lie in (0,1)");
  if (beta == 0.0) beta = default_beta(n);
  if (!(beta > 0.0 && beta < 1.0 / (n - 1))) throw ValidationError("beta must lie in (0, 1/(n-1))");
  if (dec.m != m || dec.n != n) throw ValidationError("decomposition was fitted for another (m, n)");

  IndexSet idx(m, n);
  RunParameters p;
  p.m = m;
  p.n = n;
  p.c = c;
  p.mu = mu;
  p.beta = beta;
  p.growth = growth;
  p.N = idx.size();
  p.M = dec.size();
  if (p.M < p.N) throw ValidationError("decomposition has fewer points than moments");

  p.eps = std::pow(c, beta);
  p.sigma = std::pow(2.0 * p.eps, n - 1);
  p.delta = c * c;
  const double dmin = p.M > 1 ? min_pairwise_distance(dec.points) : 1.0;
  p.rho = std::min(1.0, dmin / 5.0);
  for (const auto& x : dec.points) p.max_point_norm = std::max(p.max_point_norm, norm(x));
  p.radius_b1 = 2.0 * (p.max_point_norm + 2.0 * p.rho);
  p.radius_b2 = 1.5 * p.radius_b1;

  // v_alpha = e^{<k,x>}, k = 2(alpha+1): sup over the ball is e^{|k| R2}
  double k1 = 0.0, k2 = 0.0;
  for (const auto& a : idx) {
    double kk = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) kk += 4.0 * (a[j] + 1) * (a[j] + 1);
    const double knorm = std::sqrt(kk);
    k1 += std::exp(2.0 * knorm * p.radius_b2);
    k2 = std::max(k2, knorm * std::exp(knorm * p.radius_b2));
  }
  p.kappa1 = std::sqrt(k1);
  p.kappa2 = k2;
  p.s = n * std::exp(-2.0 * p.radius_b2 / std::sqrt(static_cast<double>(n)));
  p.s0 = std::min(p.s / 2.0, 1.0 / p.N);

  const auto& a = dec.weights;
  p.a_star = 2.0 * a.maxCoeff();
  p.r_c = 0.5 * c * a.head(static_cast<Eigen::Index>(p.N)).minCoeff();
  p.t0.resize(p.M);
  for (std::size_t j = 0; j < p.M; ++j) p.t0[j] = c * a[static_cast<Eigen::Index>(j)];

  p.lambda_hat = p.kappa2 * (p.a_star * c / p.sigma + std::sqrt(n - 1.0) * p.eps);
  p.lambda_c = p.N * p.lambda_hat;

  // Geometric smallness. Largest W box (t = a* c) and anchor inside B(p_j, rho):
  const double reach_x1 = std::max(growth == Growth::centered ? p.a_star * c / (2.0 * p.sigma)
                                                              : p.a_star * c / p.sigma,
                                    4.0 * p.delta);
  const double reach = std::sqrt(reach_x1 * reach_x1 + (p.eps + 4.0 * p.delta) * (p.eps + 4.0 * p.delta) +
                                 (n - 2.0) * p.eps * p.eps);
  p.conditions.push_back(condition("variable boxes inside B(p_j, rho)", reach, p.rho));
  // anchor straddles the top face of Q without reaching its centre line
  p.conditions.push_back(condition("anchor offset 4 delta < eps", 4.0 * p.delta, p.eps));
  // W_j(t) covers the anchor's x1 extent for every admissible pivot t
  const double t_min = c * a.head(static_cast<Eigen::Index>(p.N)).minCoeff() - p.r_c;
  const double front = growth == Growth::centered ? t_min / (2.0 * p.sigma) : t_min / p.sigma;
  p.conditions.push_back(condition("anchor overlap constant in t", 4.0 * p.delta, front));
  // admissible times stay in (0, a* c)
  p.conditions.push_back(condition("pivot times below a* c", c * a.maxCoeff() + p.r_c, p.a_star * c));
  return p;
}

}  // namespace bergman
