#include "bergman/construct.hpp"

#include <sstream>

#include "bergman/errors.hpp"

namespace bergman {

std::vector<Primitive> ConstructedDomain::primitives() const {
  auto out = background.primitives();
  for (const auto& b : boxes) out.emplace_back(b);
  return out;
}

ConeDecomposition fit_decomposition(const ConstructConfig& config) {
  validate_config(config);
  const IndexSet idx(config.m, config.n);
  DecompositionConfig dc;
  dc.seed = config.seed;
  const double mu = config.mu, beta = config.beta;
  const Growth growth = config.growth;
  dc.score = [=](const ConeDecomposition& dec) {
    // ties (typically both infeasible) fall back to conditioning
    return predicted_log_cmax(dec, mu, beta, growth) + 1e-6 * condition_score(dec);
  };
  return decompose(target_moment_vector(idx), idx, dc);
}

void validate_config(const ConstructConfig& config) {
  if (config.n < 2) throw ValidationError("n must be >= 2: there is no such domain in one variable");
  if (config.m < 1) throw ValidationError("m must be >= 1");
  if (!(config.c_initial > 0.0 && config.c_initial < 1.0)) throw ValidationError("c must lie in (0,1)");
  if (!(config.c_floor > 0.0)) throw ValidationError("c floor must be positive");
  if (!(config.mu > 0.0 && config.mu < 1.0)) throw ValidationError("mu must lie in (0,1)");
  if (config.beta != 0.0 && !(config.beta > 0.0 && config.beta < 1.0 / (config.n - 1)))
    throw ValidationError("beta must lie in (0, 1/(n-1))");
  if (!(config.tol_rel > 0.0)) throw ValidationError("tolerance must be positive");
  if (config.decomposition && (config.decomposition->m != config.m || config.decomposition->n != config.n))
    throw ValidationError("decomposition was fitted for another (m, n)");
}

namespace {

HypothesisRecord to_record(const CertifiedHypotheses& h) {
  HypothesisRecord r;
  r.lambda = h.lambda_c;
  r.lambda_tilde = h.lambda_tilde;
  r.L_inv_norm = h.L_inv_norm;
  r.offset = h.offset;
  r.r = h.r;
  r.certified = true;
  return r;
}

}  // namespace

ConstructResult construct_domain(const ConstructConfig& config) {
  validate_config(config);
  const ConeDecomposition dec = config.decomposition ? *config.decomposition : fit_decomposition(config);
  const IndexSet idx(config.m, config.n);

  ConstructResult result;
  std::string last = "none";
  for (double c = config.c_initial; c >= config.c_floor; c /= 2.0) {
    auto reject = [&](std::string why) {
      last = why;
      result.attempts.push_back({c, std::move(why)});
    };
    const auto params = derive_run_parameters(config.m, config.n, c, config.mu, dec, config.beta, config.growth);
    if (!params.conditions_hold()) {
      reject(params.first_failure());
      continue;
    }
    // the background only adds a c^2-size certified term, so check the rest first
    const CertifiedHypotheses early = certify_hypotheses(VariableBoxFamily(params, dec), dec, nullptr);
    if (!early.holds()) {
      reject(early.failing());
      continue;
    }
    try {
      auto background = build_background(params, dec, config.assembly);
      if (!background.budgets_hold()) {
        reject("background moment budgets");
        continue;
      }
      if (!background.connected) {
        reject("background connected");
        continue;
      }
      const MomentMap map(background, dec);
      if (const auto bad = map.geometry_failures(); !bad.empty()) {
        reject("variable boxes disjoint: " + bad.front());
        continue;
      }
      const auto h = certify_hypotheses(map.family(), dec, &background.moment);
      if (!h.holds()) {
        reject(h.failing());
        continue;
      }
      BrouwerProblem problem;
      problem.G = [&](const Eigen::VectorXd& tau) { return map.residual(tau); };
      problem.DG = [&](const Eigen::VectorXd& tau) { return map.jacobian(tau); };
      problem.L = dec.L;
      problem.A0 = MomentVector::Zero(static_cast<Eigen::Index>(params.N));
      problem.r = params.r_c;
      BrouwerOptions options;
      options.tol = config.tol_rel * map.target().norm();
      options.max_iter = config.max_iter;
      options.hypotheses = to_record(h);
      options.seed = config.seed;
      result.report = brouwer_solve(problem, options);

      ConstructedDomain& d = result.domain;
      d.params = params;
      d.decomposition = dec;
      d.tau_star = result.report.tau;
      const Eigen::VectorXd t = map.family().times(d.tau_star);
      for (std::size_t j = 0; j < map.family().size(); ++j) {
        d.times.push_back(t[static_cast<Eigen::Index>(j)]);
        d.boxes.push_back(map.family().box(j, d.times.back()));
      }
      d.solver_residual = result.report.residual;
      d.certified_error = background.moment.error_norm();
      d.background = std::move(background);
      result.hypotheses = h;
      result.accepted_c = c;
      return result;
    } catch (const HypothesisViolated& e) {
      reject(e.hypothesis);
    } catch (const BudgetExceeded& e) {
      reject(std::string("budget: ") + e.what());
    } catch (const RoutingFailed& e) {
      reject(std::string("routing: ") + e.what());
    } catch (const NoConvergence& e) {
      reject(std::string("convergence: ") + e.what());
    }
  }
  std::ostringstream msg;
  msg << "no admissible c >= " << config.c_floor << " for (m, n) = (" << config.m << ", " << config.n
      << "); last failing hypothesis: " << last;
  throw GiveUp(msg.str(), last);
}

}  // namespace bergman
