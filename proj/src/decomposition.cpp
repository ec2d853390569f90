#include "bergman/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <set>

#include "bergman/errors.hpp"
#include "bergman/nnls.hpp"
#include "bergman/parallel.hpp"
#include "bergman/random.hpp"

namespace bergman {

Eigen::MatrixXd ConeDecomposition::columns(const IndexSet& idx) const {
  Eigen::MatrixXd v(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(points.size()));
  for (std::size_t j = 0; j < points.size(); ++j)
    v.col(static_cast<Eigen::Index>(j)) = exp_moment_vector(idx, points[j]);
  return v;
}

MomentVector ConeDecomposition::reconstruct(const IndexSet& idx) const {
  return columns(idx) * weights;
}

double condition_score(const ConeDecomposition& dec) {
  if (!(dec.condition > 0.0) || !std::isfinite(dec.condition))
    return -std::numeric_limits<double>::infinity();
  return -std::log(dec.condition);
}

CandidatePool density_cubature(int m, int n, int order) {
  if (n < 2 || m < 0 || order < 1) throw ValidationError("density_cubature: bad arguments");
  const auto radial = gauss_jacobi01(order, 0.0, n - 1.0);
  std::vector<QuadratureRule> collapsed;
  for (int i = 0; i < n - 1; ++i) collapsed.push_back(gauss_jacobi01(order, n - 2.0 - i, 0.0));

  const double norm = std::exp(std::lgamma(m + n + 1.0) - std::lgamma(m + 1.0)) /
                      std::pow(std::numbers::pi, n) * std::pow(2.0, -n);
  CandidatePool pool;
  std::vector<int> digit(static_cast<std::size_t>(n - 1), 0);
  for (;;) {
    std::vector<double> u;
    double rem = 1.0, wu = 1.0;
    for (int i = 0; i < n - 1; ++i) {
      const double xi = collapsed[i].nodes[digit[i]];
      u.push_back(rem * xi);
      wu *= collapsed[i].weights[digit[i]];
      rem *= 1.0 - xi;
    }
    u.push_back(rem);
    for (int r = 0; r < order; ++r) {
      const double xi = radial.nodes[r];
      const double s = xi / (1.0 - xi);
      std::vector<double> x(static_cast<std::size_t>(n));
      double prod_y = 1.0;
      for (int j = 0; j < n; ++j) {
        const double y = s * u[j];
        x[j] = 0.5 * std::log(y);
        prod_y *= y;
      }
      pool.points.push_back(std::move(x));
      pool.cubature_weights.push_back(norm * radial.weights[r] * wu * std::pow(1.0 - xi, m) / prod_y);
    }
    int j = 0;
    while (j < n - 1 && ++digit[j] == order) digit[j++] = 0;
    if (j == n - 1) break;
  }
  return pool;
}

std::vector<std::vector<double>> density_samples(int m, int n, int count, std::uint64_t seed) {
  // y_j = E_j / G with E_j ~ Exp(1) and G ~ Gamma(m+1) has density proportional
  // to (1 + sum y)^{-(m+n+1)}, i.e. rho v_0 after y = e^{2x}
  Rng rng(seed);
  auto expo = [&rng] {
    double u = rng.uniform();
    while (u == 0.0) u = rng.uniform();
    return -std::log(u);
  };
  std::vector<std::vector<double>> out;
  while (static_cast<int>(out.size()) < count) {
    double g = 0.0;
    for (int i = 0; i <= m; ++i) g += expo();
    std::vector<double> x(static_cast<std::size_t>(n));
    double norm2 = 0.0;
    for (int j = 0; j < n; ++j) {
      x[j] = 0.5 * std::log(expo() / g);
      norm2 += x[j] * x[j];
    }
    // far samples carry negligible mass but would inflate every ball radius
    if (norm2 <= 16.0) out.push_back(std::move(x));
  }
  return out;
}

ConeDecomposition with_pivots(const ConeDecomposition& dec, const std::vector<std::size_t>& pivots) {
  const IndexSet idx(dec.m, dec.n);
  const std::size_t big_n = idx.size();
  if (pivots.size() != big_n) throw ValidationError("pivot list must have N entries");
  std::vector<std::size_t> order = pivots;
  std::vector<char> used(dec.size(), 0);
  for (auto p : pivots) {
    if (p >= dec.size() || used[p]) throw ValidationError("invalid pivot list");
    used[p] = 1;
  }
  for (std::size_t j = 0; j < dec.size(); ++j)
    if (!used[j]) order.push_back(j);

  ConeDecomposition out;
  out.m = dec.m;
  out.n = dec.n;
  out.strict_margin = dec.strict_margin;
  out.weights.resize(static_cast<Eigen::Index>(order.size()));
  for (std::size_t k = 0; k < order.size(); ++k) {
    out.points.push_back(dec.points[order[k]]);
    out.weights[static_cast<Eigen::Index>(k)] = dec.weights[static_cast<Eigen::Index>(order[k])];
    out.pivot_order.push_back(dec.pivot_order.empty() ? order[k] : dec.pivot_order[order[k]]);
  }
  out.L.resize(static_cast<Eigen::Index>(big_n), static_cast<Eigen::Index>(big_n));
  for (std::size_t k = 0; k < big_n; ++k)
    out.L.col(static_cast<Eigen::Index>(k)) = exp_moment_vector(idx, out.points[k]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(out.L);
  const auto& sv = svd.singularValues();
  const double smin = sv[sv.size() - 1];
  out.L_inv_norm = smin > 0.0 ? 1.0 / smin : std::numeric_limits<double>::infinity();
  out.condition = smin > 0.0 ? sv[0] / smin : std::numeric_limits<double>::infinity();
  return out;
}

namespace {

std::vector<std::size_t> greedy_pivots(const Eigen::MatrixXd& normalised, std::size_t big_n) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(normalised);
  qr.setThreshold(1e-10);
  if (static_cast<std::size_t>(qr.rank()) < big_n)
    throw RankDeficient("candidate columns do not span R^N");
  std::vector<std::size_t> piv;
  for (std::size_t k = 0; k < big_n; ++k)
    piv.push_back(static_cast<std::size_t>(qr.colsPermutation().indices()[static_cast<Eigen::Index>(k)]));
  return piv;
}

struct PoolSystem {
  Eigen::MatrixXd unit;   // columns scaled to unit norm
  Eigen::VectorXd scale;  // original column norms
  Eigen::VectorXd target;
  double feasible_tol = 0.0;
};

struct StrictFit {
  Eigen::VectorXd weights;  // original scale, zero off the support
  double margin = 0.0;
};

std::optional<StrictFit> strict_fit(const PoolSystem& sys, const std::vector<std::size_t>& pivots) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(sys.target.size());
  for (auto j : pivots) u += sys.unit.col(static_cast<Eigen::Index>(j));
  double hi = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < u.size(); ++i) hi = std::min(hi, sys.target[i] / u[i]);
  double lo = 0.0;
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (nnls(sys.unit, sys.target - mid * u).residual_norm <= sys.feasible_tol)
      lo = mid;
    else
      hi = mid;
  }
  // a shift at the level of the fit tolerance is not a strict interior point
  if (!(lo * u.norm() > 1e-8 * sys.target.norm())) return std::nullopt;
  const Eigen::VectorXd shifted = sys.target - lo * u;
  auto fit = nnls(sys.unit, shifted);
  if (fit.residual_norm > sys.feasible_tol) return std::nullopt;

  // drop negligible non-pivot columns when the fit survives without them
  std::set<std::size_t> pivot_set(pivots.begin(), pivots.end());
  const double bmax = fit.x.maxCoeff();
  std::vector<Eigen::Index> keep;
  bool dropped = false;
  for (Eigen::Index j = 0; j < fit.x.size(); ++j) {
    if (pivot_set.count(static_cast<std::size_t>(j)) || fit.x[j] > 1e-9 * bmax)
      keep.push_back(j);
    else if (fit.x[j] > 0.0)
      dropped = true;
  }
  Eigen::VectorXd b = fit.x;
  if (dropped) {
    Eigen::MatrixXd sub(sys.unit.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = sys.unit.col(keep[k]);
    auto refit = nnls(sub, shifted);
    if (refit.residual_norm <= sys.feasible_tol) {
      b.setZero();
      for (std::size_t k = 0; k < keep.size(); ++k) b[keep[k]] = refit.x[static_cast<Eigen::Index>(k)];
    }
  }
  StrictFit out;
  out.margin = lo;
  out.weights = b;
  for (auto j : pivots) out.weights[static_cast<Eigen::Index>(j)] += lo;
  out.weights = out.weights.cwiseQuotient(sys.scale);
  return out;
}

ConeDecomposition assemble(int m, int n, const std::vector<std::vector<double>>& pool,
                           const StrictFit& fit, const std::vector<std::size_t>& pivots) {
  ConeDecomposition dec;
  dec.m = m;
  dec.n = n;
  dec.strict_margin = fit.margin;
  std::vector<double> w;
  for (std::size_t j = 0; j < pool.size(); ++j) {
    const double a = fit.weights[static_cast<Eigen::Index>(j)];
    if (a <= 0.0) continue;
    dec.points.push_back(pool[j]);
    dec.pivot_order.push_back(j);
    w.push_back(a);
  }
  dec.weights = Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  std::vector<std::size_t> mapped;
  for (auto p : pivots) {
    auto it = std::find(dec.pivot_order.begin(), dec.pivot_order.end(), p);
    mapped.push_back(static_cast<std::size_t>(it - dec.pivot_order.begin()));
  }
  return with_pivots(dec, mapped);
}

struct Candidate {
  double score = -std::numeric_limits<double>::infinity();
  std::optional<ConeDecomposition> dec;
};

}  // namespace

ConeDecomposition select_pivot_basis(const ConeDecomposition& dec) {
  const IndexSet idx(dec.m, dec.n);
  Eigen::MatrixXd v = dec.columns(idx);
  Eigen::VectorXd norms = v.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < v.cols(); ++j) v.col(j) /= norms[j];
  return with_pivots(dec, greedy_pivots(v, idx.size()));
}

ConeDecomposition decompose_from_pool(const MomentVector& target, const IndexSet& idx,
                                      const std::vector<std::vector<double>>& pool,
                                      const DecompositionConfig& config) {
  if (target.size() != static_cast<Eigen::Index>(idx.size())) throw ValidationError("target length != N");
  if (target.minCoeff() <= 0.0) throw ValidationError("target must be strictly positive");
  if (pool.empty()) throw CandidateExhausted("empty candidate pool");
  const std::size_t big_n = idx.size();
  const DecompositionScore score = config.score ? config.score : DecompositionScore(condition_score);

  PoolSystem sys;
  sys.target = target;
  sys.feasible_tol = 1e-3 * config.residual_tol * target.norm();
  sys.unit.resize(static_cast<Eigen::Index>(big_n), static_cast<Eigen::Index>(pool.size()));
  sys.scale.resize(static_cast<Eigen::Index>(pool.size()));
  for (std::size_t j = 0; j < pool.size(); ++j) {
    Eigen::VectorXd col = exp_moment_vector(idx, pool[j]);
    sys.scale[static_cast<Eigen::Index>(j)] = col.norm();
    sys.unit.col(static_cast<Eigen::Index>(j)) = col / col.norm();
  }

  auto plain = nnls(sys.unit, target);
  if (plain.residual_norm > config.residual_tol * target.norm())
    throw CandidateExhausted("target is not in the cone of the candidate pool");

  auto evaluate = [&](const std::vector<std::size_t>& pivots) {
    Candidate c;
    Eigen::MatrixXd sub(static_cast<Eigen::Index>(big_n), static_cast<Eigen::Index>(big_n));
    for (std::size_t k = 0; k < big_n; ++k) sub.col(static_cast<Eigen::Index>(k)) = sys.unit.col(static_cast<Eigen::Index>(pivots[k]));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub);
    const auto& sv = svd.singularValues();
    if (!(sv[sv.size() - 1] > 1e-12 * sv[0])) return c;
    auto fit = strict_fit(sys, pivots);
    if (!fit) return c;
    c.dec = assemble(idx.m(), idx.n(), pool, *fit, pivots);
    c.score = score(*c.dec);
    if (std::isnan(c.score)) c.score = -std::numeric_limits<double>::infinity();
    return c;
  };
  auto evaluate_all = [&](const std::vector<std::vector<std::size_t>>& sets) {
    std::vector<Candidate> results(sets.size());
    parallel_for(sets.size(), [&](std::size_t k) { results[k] = evaluate(sets[k]); });
    return results;
  };

  std::vector<std::vector<std::size_t>> sets;
  if (pool.size() < big_n) throw RankDeficient("fewer candidates than moments");
  {
    sets.push_back(greedy_pivots(sys.unit, big_n));
    Rng rng(config.seed);
    for (int s = 0; s < config.random_subsets; ++s) {
      std::vector<std::size_t> perm(pool.size());
      for (std::size_t j = 0; j < perm.size(); ++j) perm[j] = j;
      for (std::size_t k = 0; k < big_n; ++k) {
        const std::size_t pick = k + static_cast<std::size_t>(rng.next() % (perm.size() - k));
        std::swap(perm[k], perm[pick]);
      }
      perm.resize(big_n);
      std::sort(perm.begin(), perm.end());
      sets.push_back(perm);
    }
  }

  Candidate best;
  std::vector<std::size_t> best_set;
  {
    auto results = evaluate_all(sets);
    for (std::size_t k = 0; k < results.size(); ++k)
      if (results[k].score > best.score) {
        best = std::move(results[k]);
        best_set = sets[k];
      }
  }

  for (int round = 0; round < config.swap_rounds && best.dec; ++round) {
    bool improved = false;
    for (std::size_t pos = 0; pos < big_n; ++pos) {
      std::vector<std::vector<std::size_t>> trials;
      for (std::size_t j = 0; j < pool.size(); ++j) {
        if (std::find(best_set.begin(), best_set.end(), j) != best_set.end()) continue;
        auto t = best_set;
        t[pos] = j;
        trials.push_back(t);
      }
      auto results = evaluate_all(trials);
      for (std::size_t k = 0; k < results.size(); ++k)
        if (results[k].score > best.score) {
          best = std::move(results[k]);
          best_set = trials[k];
          improved = true;
        }
    }
    if (!improved) break;
  }

  if (!best.dec) {
    // target on the boundary of the cone: no strictly positive pivot fit, return
    // the plain fit when it is exact
    ConeDecomposition dec;
    dec.m = idx.m();
    dec.n = idx.n();
    std::vector<double> w;
    for (std::size_t j = 0; j < pool.size(); ++j) {
      const double b = plain.x[static_cast<Eigen::Index>(j)];
      if (b <= 0.0) continue;
      dec.points.push_back(pool[j]);
      dec.pivot_order.push_back(j);
      w.push_back(b / sys.scale[static_cast<Eigen::Index>(j)]);
    }
    if (w.empty()) throw CandidateExhausted("no nonnegative fit found");
    dec.weights = Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    if (dec.size() < big_n)
      return dec;
    throw CandidateExhausted("no strictly positive spanning fit within the candidate budget");
  }
  return *best.dec;
}

ConeDecomposition decompose(const MomentVector& target, const IndexSet& idx,
                            const DecompositionConfig& config) {
  const int order = config.cubature_order > 0 ? config.cubature_order : idx.m() + 2;
  auto cub = density_cubature(idx.m(), idx.n(), order);
  auto pool = cub.points;
  const int samples = config.importance_samples >= 0 ? config.importance_samples
                                                     : static_cast<int>(pool.size());
  auto extra = density_samples(idx.m(), idx.n(), samples, stream_seed(config.seed, 0));
  pool.insert(pool.end(), extra.begin(), extra.end());
  return decompose_from_pool(target, idx, pool, config);
}

DecompositionReport verify_decomposition(const ConeDecomposition& dec, const MomentVector& target,
                                         double tol) {
  DecompositionReport rep;
  const IndexSet idx(dec.m, dec.n);
  const std::size_t big_n = idx.size();
  if (dec.points.size() != static_cast<std::size_t>(dec.weights.size()) || dec.points.empty()) {
    rep.failures.push_back("shape");
    return rep;
  }
  const Eigen::MatrixXd cols = dec.columns(idx);
  rep.residual = (cols * dec.weights - target).norm() / target.norm();
  rep.min_weight = dec.weights.minCoeff();
  if (dec.size() < big_n) rep.failures.push_back("size: M < N");
  if (!(rep.min_weight > 0.0)) rep.failures.push_back("positivity");
  if (!(rep.residual <= tol)) rep.failures.push_back("residual");

  Eigen::MatrixXd unit = cols;
  for (Eigen::Index j = 0; j < unit.cols(); ++j) unit.col(j) /= unit.col(j).norm();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(unit);
  qr.setThreshold(1e-10);
  rep.rank = static_cast<int>(qr.rank());
  if (static_cast<std::size_t>(rep.rank) < big_n) rep.failures.push_back("rank");

  if (dec.size() >= big_n) {
    const Eigen::MatrixXd l = cols.leftCols(static_cast<Eigen::Index>(big_n));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(l);
    const auto& sv = svd.singularValues();
    const double smin = sv[sv.size() - 1];
    rep.condition = smin > 0.0 ? sv[0] / smin : std::numeric_limits<double>::infinity();
    rep.L_inv_norm = smin > 0.0 ? 1.0 / smin : std::numeric_limits<double>::infinity();
    if (smin > 0.0) {
      const Eigen::MatrixXd inv = l.fullPivLu().inverse();
      rep.inverse_error = (l * inv - Eigen::MatrixXd::Identity(l.rows(), l.cols())).cwiseAbs().maxCoeff();
    } else {
      rep.inverse_error = std::numeric_limits<double>::infinity();
    }
    if (!(rep.inverse_error <= 1e-8)) rep.failures.push_back("pivot matrix not invertible");
  }
  rep.pass = rep.failures.empty();
  return rep;
}

}  // namespace bergman
