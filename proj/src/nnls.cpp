#include "bergman/nnls.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include "bergman/errors.hpp"

namespace bergman {

namespace {

Eigen::VectorXd solve_passive(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                              const std::vector<int>& passive) {
  Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(passive.size()));
  for (std::size_t k = 0; k < passive.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = a.col(passive[k]);
  return sub.colPivHouseholderQr().solve(b);
}

}  // namespace

NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iter) {
  if (a.rows() != b.size()) throw ValidationError("nnls: dimension mismatch");
  const Eigen::Index cols = a.cols();
  if (max_iter <= 0) max_iter = static_cast<int>(3 * cols + 30);

  Eigen::VectorXd col_norm = a.colwise().norm().transpose();
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() *
                     std::max(1.0, col_norm.maxCoeff()) * std::max(1.0, b.norm());

  NnlsResult out;
  out.x = Eigen::VectorXd::Zero(cols);
  std::vector<char> in_passive(static_cast<std::size_t>(cols), 0);
  // columns that were rejected right after entering; retried once another enters
  std::vector<char> blocked(static_cast<std::size_t>(cols), 0);
  Eigen::VectorXd w = a.transpose() * (b - a * out.x);

  while (out.iterations < max_iter) {
    Eigen::Index enter = -1;
    double best = tol;
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (in_passive[j] || blocked[j]) continue;
      if (w[j] > best || (enter >= 0 && w[j] == best && col_norm[j] > col_norm[enter])) {
        best = w[j];
        enter = j;
      }
    }
    if (enter < 0) {
      out.converged = true;
      break;
    }
    in_passive[enter] = 1;
    ++out.iterations;

    for (;;) {
      std::vector<int> passive;
      for (Eigen::Index j = 0; j < cols; ++j)
        if (in_passive[j]) passive.push_back(static_cast<int>(j));
      Eigen::VectorXd z = solve_passive(a, b, passive);

      bool feasible = true;
      for (Eigen::Index k = 0; k < z.size(); ++k)
        if (z[k] <= 0.0) feasible = false;
      if (feasible) {
        out.x.setZero();
        for (std::size_t k = 0; k < passive.size(); ++k) out.x[passive[k]] = z[static_cast<Eigen::Index>(k)];
        break;
      }
      // step back towards the previous iterate until a passive entry hits zero
      double alpha = std::numeric_limits<double>::infinity();
      int blocking = -1;
      for (std::size_t k = 0; k < passive.size(); ++k) {
        const double zk = z[static_cast<Eigen::Index>(k)];
        if (zk <= 0.0) {
          const double xk = out.x[passive[k]];
          const double step = xk / (xk - zk);
          if (step < alpha) {
            alpha = step;
            blocking = passive[k];
          }
        }
      }
      for (std::size_t k = 0; k < passive.size(); ++k) {
        const int j = passive[k];
        out.x[j] += alpha * (z[static_cast<Eigen::Index>(k)] - out.x[j]);
        if (j == blocking || out.x[j] <= 0.0) {
          out.x[j] = 0.0;
          in_passive[j] = 0;
        }
      }
      if (++out.iterations >= max_iter) break;
    }
    if (in_passive[enter])
      std::fill(blocked.begin(), blocked.end(), 0);
    else
      blocked[enter] = 1;
    w = a.transpose() * (b - a * out.x);
  }
  out.residual_norm = (a * out.x - b).norm();
  return out;
}

}  // namespace bergman
