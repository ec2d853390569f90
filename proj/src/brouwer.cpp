#include "bergman/brouwer.hpp"

#include <cmath>
#include <sstream>

#include "bergman/errors.hpp"
#include "bergman/random.hpp"

namespace bergman {

namespace {

double spectral_norm(const Eigen::MatrixXd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues()(0);
}

Eigen::VectorXd uniform_in_ball(Rng& rng, Eigen::Index n, double r) {
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.normal();
  const double scale = r * std::pow(rng.uniform(), 1.0 / static_cast<double>(n)) / x.norm();
  return x * scale;
}

}  // namespace

std::string HypothesisRecord::failing() const {
  if (!lambda_holds()) return "lambda |L^-1| <= 1/2";
  if (!offset_holds()) return "offset <= r/2";
  return {};
}

HypothesisRecord sample_hypotheses(const BrouwerProblem& problem, std::size_t samples, std::uint64_t seed) {
  const auto n = problem.L.rows();
  const Eigen::MatrixXd X = problem.L.inverse();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  HypothesisRecord h;
  h.r = problem.r;
  h.L_inv_norm = spectral_norm(X);
  h.offset = (X * (problem.G(Eigen::VectorXd::Zero(n)) - problem.A0)).norm();
  Rng rng(seed);
  for (std::size_t s = 0; s <= samples; ++s) {
    const Eigen::VectorXd tau = s == 0 ? Eigen::VectorXd::Zero(n) : uniform_in_ball(rng, n, problem.r);
    const Eigen::MatrixXd D = problem.DG(tau);
    h.lambda = std::max(h.lambda, spectral_norm(D - problem.L));
    h.lambda_tilde = std::max(h.lambda_tilde, spectral_norm(X * D - I));
  }
  h.samples = samples + 1;
  return h;
}

SolverReport brouwer_solve(const BrouwerProblem& problem, const BrouwerOptions& options) {
  const auto n = problem.L.rows();
  if (problem.L.cols() != n || problem.A0.size() != n) throw ValidationError("problem dimensions differ");
  if (!(problem.r > 0.0)) throw ValidationError("ball radius must be positive");

  SolverReport report;
  report.hypotheses = options.hypotheses ? *options.hypotheses
                                         : sample_hypotheses(problem, options.samples, options.seed);
  if (!report.hypotheses.holds()) {
    std::ostringstream msg;
    msg << "hypothesis '" << report.hypotheses.failing() << "' fails: lambda " << report.hypotheses.lambda
        << ", lambda_tilde " << report.hypotheses.lambda_tilde << ", |L^-1| " << report.hypotheses.L_inv_norm
        << ", offset " << report.hypotheses.offset << ", r " << report.hypotheses.r;
    throw HypothesisViolated(msg.str(), report.hypotheses.failing());
  }

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(problem.L);
  const double floor = 1e-8 * problem.r;
  Eigen::VectorXd tau = Eigen::VectorXd::Zero(n);
  double last_step = 0.0;
  for (int k = 0;; ++k) {
    const Eigen::VectorXd g = problem.G(tau) - problem.A0;
    IterateRecord rec{k, tau, g.norm(), 0.0};
    if (rec.residual <= options.tol) {
      report.log.push_back(rec);
      report.converged = true;
      break;
    }
    if (k >= options.max_iter) {
      report.log.push_back(rec);
      std::ostringstream msg;
      msg << "no convergence after " << k << " iterations, residual " << rec.residual;
      throw NoConvergence(msg.str());
    }
    const Eigen::VectorXd step = lu.solve(g);
    rec.step = step.norm();
    report.log.push_back(rec);
    if (k > 0 && last_step > floor && rec.step > floor)
      report.contraction = std::max(report.contraction, rec.step / last_step);
    last_step = rec.step;
    tau -= step;
    if (tau.norm() > problem.r * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "iterate " << k + 1 << " left the ball: |tau| = " << tau.norm() << " > r = " << problem.r;
      throw HypothesisViolated(msg.str(), "iterates stay in the ball");
    }
  }
  report.tau = tau;
  report.residual = report.log.back().residual;
  report.iterations = report.log.back().iteration;
  return report;
}

}  // namespace bergman
