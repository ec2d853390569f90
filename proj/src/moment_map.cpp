#include "bergman/moment_map.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "bergman/box_ops.hpp"
#include "bergman/errors.hpp"
#include "bergman/relations.hpp"

namespace bergman {

namespace {

// sinh(x)/x - 1, exp(x)-1 over x minus 1, cosh(x) - 1, all without cancellation
double sinhc_m1(double x) {
  const double x2 = x * x;
  if (std::abs(x) < 1e-2) return x2 / 6.0 * (1.0 + x2 / 20.0 * (1.0 + x2 / 42.0));
  return std::sinh(x) / x - 1.0;
}

double expm1c_m1(double x) {
  if (std::abs(x) < 1e-2) return x / 2.0 * (1.0 + x / 3.0 * (1.0 + x / 4.0 * (1.0 + x / 5.0)));
  return (std::expm1(x) - x) / x;
}

double cosh_m1(double x) {
  const double s = std::sinh(x / 2.0);
  return 2.0 * s * s;
}

// (1 + a)(1 + b) - 1
double product_m1(double a, double b) { return std::expm1(std::log1p(a) + std::log1p(b)); }

double spectral_norm(const Eigen::MatrixXd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues()(0);
}

constexpr double kRelativeRounding = 1e-13;

}  // namespace

VariableBoxFamily::VariableBoxFamily(const RunParameters& params, const ConeDecomposition& dec)
    : params_(params), idx_(params.m, params.n), points_(dec.points), weights_(dec.weights) {
  if (points_.size() != params_.M) throw ValidationError("decomposition does not match run parameters");
  const auto n = static_cast<std::size_t>(params_.n);
  k_.resize(static_cast<Eigen::Index>(idx_.size()), static_cast<Eigen::Index>(n));
  cross_section_m1_.resize(static_cast<Eigen::Index>(idx_.size()));
  for (std::size_t i = 0; i < idx_.size(); ++i) {
    double acc = 0.0;
    for (std::size_t d = 0; d < n; ++d) {
      k_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = 2.0 * (idx_[i][d] + 1);
      if (d > 0) acc += std::log1p(sinhc_m1(2.0 * (idx_[i][d] + 1) * params_.eps));
    }
    cross_section_m1_[static_cast<Eigen::Index>(i)] = std::expm1(acc);
  }
  for (const auto& p : points_) v_.push_back(exp_moment_vector(idx_, p));
  for (std::size_t j = 0; j < points_.size(); ++j) {
    const auto cut = intersect(anchor(j), box(j, params_.t0[j]));
    overlap_.push_back(cut ? box_moment(idx_, *cut) : MomentVector::Zero(static_cast<Eigen::Index>(idx_.size())));
  }
}

AxisBox VariableBoxFamily::anchor(std::size_t j) const { return anchor_box(params_, points_.at(j)); }

AxisBox VariableBoxFamily::box(std::size_t j, double t) const {
  if (!(t > 0.0)) throw DomainViolation("variable box needs t > 0");
  AxisBox b{make_point(points_.at(j)), make_point(points_.at(j))};
  if (params_.growth == Growth::centered) {
    const Coord h = t / (2.0 * params_.sigma);
    b.lower[0] -= h;
    b.upper[0] += h;
  } else {
    b.upper[0] += Coord(t / params_.sigma);
  }
  const Coord e = params_.eps;
  for (std::size_t k = 1; k < b.dim(); ++k) {
    b.lower[k] -= e;
    b.upper[k] += e;
  }
  return b;
}

Eigen::VectorXd VariableBoxFamily::times(const Eigen::VectorXd& tau) const {
  if (static_cast<std::size_t>(tau.size()) != params_.N) throw ValidationError("tau has the wrong length");
  Eigen::VectorXd t(static_cast<Eigen::Index>(size()));
  for (std::size_t j = 0; j < size(); ++j)
    t[static_cast<Eigen::Index>(j)] = params_.t0[j] + (j < params_.N ? tau[static_cast<Eigen::Index>(j)] : 0.0);
  return t;
}

double VariableBoxFamily::t_min(std::size_t j) const {
  return j < params_.N ? params_.t0.at(j) - params_.r_c : params_.t0.at(j);
}

double VariableBoxFamily::t_max(std::size_t j) const {
  return j < params_.N ? params_.t0.at(j) + params_.r_c : params_.t0.at(j);
}

MomentVector VariableBoxFamily::excess(std::size_t j, double t) const {
  MomentVector out(static_cast<Eigen::Index>(idx_.size()));
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double k1 = k_(i, 0);
    const double along = params_.growth == Growth::centered ? sinhc_m1(k1 * t / (2.0 * params_.sigma))
                                                            : expm1c_m1(k1 * t / params_.sigma);
    out[i] = v_[j][i] * t * product_m1(along, cross_section_m1_[i]);
  }
  return out;
}

MomentVector VariableBoxFamily::moment(std::size_t j, double t) const { return t * v_.at(j) + excess(j, t); }

MomentVector VariableBoxFamily::derivative_excess(std::size_t j, double t) const {
  MomentVector out(static_cast<Eigen::Index>(idx_.size()));
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double k1 = k_(i, 0);
    const double along = params_.growth == Growth::centered ? cosh_m1(k1 * t / (2.0 * params_.sigma))
                                                            : std::expm1(k1 * t / params_.sigma);
    out[i] = v_[j][i] * product_m1(along, cross_section_m1_[i]);
  }
  return out;
}

MomentVector VariableBoxFamily::derivative(std::size_t j, double t) const {
  return v_.at(j) + derivative_excess(j, t);
}

std::string CertifiedHypotheses::failing() const {
  if (!lambda_holds) return "lambda_tilde <= 1/2";
  if (!offset_holds) return "offset <= r/2";
  return {};
}

CertifiedHypotheses certify_hypotheses(const VariableBoxFamily& family, const ConeDecomposition& dec,
                                       const CertifiedMoment* background) {
  const auto& p = family.params();
  const auto N = static_cast<Eigen::Index>(p.N);
  const Eigen::MatrixXd X = dec.L.inverse();
  CertifiedHypotheses h;
  h.r = p.r_c;
  h.L_inv_norm = spectral_norm(X);
  h.lambda_hat = p.lambda_hat;
  h.lambda_c = p.lambda_c;
  h.closed_form_lambda_holds = p.lambda_c * h.L_inv_norm <= 0.5;

  // I - X DPsi = (I - X L) - sum_j X diag(v_j) g_j(t_j) e_j^T, g_j = D_j(t) - 1 >= 0 and
  // increasing in t. Column sups are taken over a grid with the increment bound between
  // nodes; the Frobenius norm bounds the operator norm.
  constexpr int kIntervals = 64;
  double sum_sq = 0.0;
  for (Eigen::Index j = 0; j < N; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    const Eigen::MatrixXd B = X * family.point_moment(ju).asDiagonal();
    const double B_norm = spectral_norm(B);
    const double lo = family.t_min(ju), hi = family.t_max(ju);
    // g_j(t) = derivative_excess / v_j entrywise, so B g = X derivative_excess
    MomentVector prev = family.derivative_excess(ju, lo);
    double col = 0.0;
    for (int i = 1; i <= kIntervals; ++i) {
      const double t = lo + (hi - lo) * i / kIntervals;
      const MomentVector next = family.derivative_excess(ju, t);
      // ||X diag(v) (g(t_i) + d)|| <= ||X prev|| + ||B|| ||(next - prev)/v||
      const Eigen::VectorXd rise = (next - prev).cwiseQuotient(family.point_moment(ju));
      col = std::max(col, (X * prev).norm() + B_norm * rise.norm());
      prev = next;
    }
    sum_sq += col * col;
  }
  const double inverse_defect = (Eigen::MatrixXd::Identity(N, N) - X * dec.L).norm();
  h.lambda_tilde = (std::sqrt(sum_sq) + inverse_defect) * (1.0 + 1e-12);
  h.lambda_holds = h.lambda_tilde <= 0.5;

  // Psi(0) - cA = background - overlaps + sum_j excess_j(t0_j) + (sum_j c a_j v_j - cA)
  const IndexSet idx(p.m, p.n);
  const MomentVector cA = p.c * target_moment_vector(idx);
  MomentVector resid = MomentVector::Zero(N);
  MomentVector scale = cA.cwiseAbs();
  MomentVector split_sum = -cA;
  for (std::size_t j = 0; j < family.size(); ++j) {
    const MomentVector base = p.t0[j] * family.point_moment(j);
    split_sum += base;
    scale += base.cwiseAbs();
    resid += family.excess(j, p.t0[j]) - family.anchor_overlap(j);
  }
  resid += split_sum;
  MomentVector err = kRelativeRounding * (scale + resid.cwiseAbs());
  if (background) {
    resid += background->value;
    err += background->error;
    h.background_error = background->error_norm();
  }
  h.offset = (X * resid).norm() + h.L_inv_norm * err.norm();
  h.offset_holds = h.offset <= h.r / 2.0;
  return h;
}

double predicted_log_cmax(const ConeDecomposition& dec, double mu, double beta, Growth growth, double c_floor) {
  auto feasible = [&](double log_c) {
    try {
      const auto p = derive_run_parameters(dec.m, dec.n, std::exp(log_c), mu, dec, beta, growth);
      if (!p.conditions_hold()) return false;
      return certify_hypotheses(VariableBoxFamily(p, dec), dec, nullptr).holds();
    } catch (const Error&) {
      return false;
    }
  };
  double lo = std::log(c_floor), hi = std::log(0.5);
  if (!feasible(lo)) return -std::numeric_limits<double>::infinity();
  if (feasible(hi)) return hi;
  while (hi - lo > 0.01) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return lo;
}

MomentMap::MomentMap(const AssembledBackground& background, const ConeDecomposition& dec)
    : background_(&background), family_(background.params, dec), L_(dec.L) {
  const auto& p = background.params;
  const IndexSet idx(p.m, p.n);
  cA_ = p.c * target_moment_vector(idx);
  fixed_part_ = background.moment.value - cA_;
  for (std::size_t j = 0; j < family_.size(); ++j) {
    fixed_part_ -= family_.anchor_overlap(j);
    if (j >= p.N) fixed_part_ += family_.moment(j, p.t0[j]);
  }
}

void MomentMap::check_domain(const Eigen::VectorXd& t) const {
  const auto& p = family_.params();
  for (std::size_t j = 0; j < p.N; ++j) {
    const double tj = t[static_cast<Eigen::Index>(j)];
    if (!(tj > 0.0 && tj < p.a_star * p.c)) {
      std::ostringstream msg;
      msg << "pivot time t_" << j << " = " << tj << " outside (0, a* c)";
      throw DomainViolation(msg.str());
    }
  }
}

MomentVector MomentMap::residual(const Eigen::VectorXd& tau) const {
  const Eigen::VectorXd t = family_.times(tau);
  check_domain(t);
  MomentVector out = fixed_part_;
  for (std::size_t j = 0; j < family_.params().N; ++j) out += family_.moment(j, t[static_cast<Eigen::Index>(j)]);
  return out;
}

MomentVector MomentMap::operator()(const Eigen::VectorXd& tau) const { return residual(tau) + cA_; }

Eigen::MatrixXd MomentMap::jacobian(const Eigen::VectorXd& tau) const {
  const Eigen::VectorXd t = family_.times(tau);
  check_domain(t);
  const auto N = static_cast<Eigen::Index>(family_.params().N);
  Eigen::MatrixXd J(N, N);
  for (Eigen::Index j = 0; j < N; ++j) J.col(j) = family_.derivative(static_cast<std::size_t>(j), t[j]);
  return J;
}

std::vector<std::string> MomentMap::geometry_failures() const {
  std::vector<std::string> out;
  const auto pieces = background_->primitives();
  std::vector<AxisBox> largest;
  for (std::size_t j = 0; j < family_.size(); ++j) largest.push_back(family_.box(j, family_.t_max(j)));

  // primitives() order: hub, tail, tail corridor, simplex, simplex corridor, anchors, skeleton
  const std::size_t first_anchor = 5;
  for (std::size_t j = 0; j < family_.size(); ++j) {
    for (std::size_t q = 0; q < pieces.size(); ++q) {
      if (q == first_anchor + j) continue;
      bool disjoint = false;
      try {
        disjoint = relate(Primitive(largest[j]), pieces[q]).disjoint;
      } catch (const Inconclusive&) {
      }
      if (!disjoint) out.push_back("W_" + std::to_string(j) + " meets " + kind_name(pieces[q]) + " #" + std::to_string(q));
    }
    for (std::size_t k = j + 1; k < family_.size(); ++k)
      if (intersect(largest[j], largest[k]))
        out.push_back("W_" + std::to_string(j) + " meets W_" + std::to_string(k));
    const auto a = intersect(family_.anchor(j), family_.box(j, family_.t_min(j)));
    const auto b = intersect(family_.anchor(j), largest[j]);
    const bool same = a && b && a->lower == b->lower && a->upper == b->upper;
    if (!same) out.push_back("U_" + std::to_string(j) + " overlap with W_" + std::to_string(j) + " varies with t");
  }
  return out;
}

std::vector<Primitive> MomentMap::domain_primitives(const Eigen::VectorXd& tau) const {
  const Eigen::VectorXd t = family_.times(tau);
  check_domain(t);
  auto out = background_->primitives();
  for (std::size_t j = 0; j < family_.size(); ++j) out.emplace_back(family_.box(j, t[static_cast<Eigen::Index>(j)]));
  return out;
}

}  // namespace bergman
