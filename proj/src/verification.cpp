#include "bergman/verification.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "bergman/box_ops.hpp"
#include "bergman/errors.hpp"
#include "bergman/parallel.hpp"
#include "bergman/random.hpp"
#include "bergman/relations.hpp"
#include "bergman/union_moment.hpp"

namespace bergman {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// |z^alpha|^2 = prod |z_j|^{2 alpha_j}
double monomial_sq(const MultiIndex& a, const ComplexPoint& z) {
  double out = 1.0;
  for (std::size_t j = 0; j < a.size(); ++j) out *= std::pow(std::norm(z[j]), a[j]);
  return out;
}

}  // namespace

MomentAudit audit_moments(const ConstructedDomain& domain, double tol_rel) {
  const auto& p = domain.params;
  const IndexSet idx(p.m, p.n);
  // a higher starting shell order than the construction's default
  const auto u = union_moment(domain.primitives(), idx, kNoBudget, 12);
  MomentAudit a;
  a.measured = u.moment.value;
  a.error = u.moment.error;
  a.target = p.c * target_moment_vector(idx);
  const MomentVector diff = a.measured - a.target;
  a.relative = diff.cwiseAbs().cwiseQuotient(a.target);
  a.residual = diff.norm();
  a.relative_residual = (a.residual + a.error.norm()) / a.target.norm();
  a.bound = 10.0 * (tol_rel * a.target.norm() + domain.certified_error + a.error.norm());
  a.relative.maxCoeff(&a.worst);
  a.pass = a.residual <= a.bound;
  return a;
}

std::vector<DivergenceCertificate> divergence_report(const ConstructedDomain& domain) {
  const auto pieces = domain.primitives();
  const int m = domain.params.m, n = domain.params.n;
  std::vector<DivergenceCertificate> out;
  for (const auto& a : multi_indices_of_degree(m + 1, n)) out.push_back(divergence_certificate(a, m, pieces));
  for (int i = 0; i < n; ++i) {
    std::vector<int> e(static_cast<std::size_t>(n), 0);
    e[static_cast<std::size_t>(i)] = -1;
    out.push_back(divergence_certificate(MultiIndex(e), m, pieces));
    e[static_cast<std::size_t>((i + 1) % n)] = m + 1;
    out.push_back(divergence_certificate(MultiIndex(e), m, pieces));
  }
  return out;
}

KernelModel::KernelModel(int m, int n, double c) : idx_(m, n), c_(c) {
  norms_ = std::pow(kTwoPi, n) * c * target_moment_vector(idx_);
}

KernelModel::KernelModel(int m, int n, double c, const MomentVector& moments) : idx_(m, n), c_(c) {
  if (moments.size() != static_cast<Eigen::Index>(idx_.size())) throw ValidationError("moment vector has the wrong length");
  if (moments.minCoeff() <= 0.0) throw ValidationError("measured moments must be positive");
  norms_ = std::pow(kTwoPi, n) * moments;
}

double KernelModel::closed_form(const ComplexPoint& z) const {
  double q = 0.0;
  for (const auto& zi : z) q += std::norm(zi);
  return std::pow(1.0 + q, idx_.m()) / c_;
}

double KernelModel::series(const ComplexPoint& z) const {
  if (z.size() != static_cast<std::size_t>(idx_.n())) throw ValidationError("point has the wrong dimension");
  double s = 0.0;
  for (std::size_t k = 0; k < idx_.size(); ++k) s += monomial_sq(idx_[k], z) / norms_[static_cast<Eigen::Index>(k)];
  return s;
}

double KernelModel::potential(const ComplexPoint& z) const { return std::log(series(z)); }

KernelCheck kernel_check(const KernelModel& kernel, const std::vector<ComplexPoint>& points) {
  KernelCheck out;
  out.samples = points.size();
  for (const auto& z : points)
    out.max_deviation = std::max(out.max_deviation, std::abs(kernel.series(z) / kernel.closed_form(z) - 1.0));
  out.pass = out.max_deviation <= 1e-6;
  return out;
}

std::vector<ComplexPoint> lifted_samples(const ConstructedDomain& domain, std::size_t count, std::uint64_t seed) {
  if (domain.boxes.empty()) throw ValidationError("domain has no solved boxes to sample");
  Rng rng(seed);
  std::vector<ComplexPoint> points;
  for (std::size_t s = 0; s < count; ++s) {
    const auto& b = domain.boxes[rng.next() % domain.boxes.size()];
    ComplexPoint z(b.dim());
    for (std::size_t j = 0; j < b.dim(); ++j) {
      const double lo = to_double(b.lower[j]), hi = to_double(b.upper[j]);
      z[j] = std::polar(std::exp(rng.uniform(lo, hi)), rng.uniform(0.0, kTwoPi));
    }
    points.push_back(std::move(z));
  }
  return points;
}

KernelCheck kernel_check(const KernelModel& kernel, const ConstructedDomain& domain, std::size_t sample_count,
                         std::uint64_t seed) {
  const auto points = lifted_samples(domain, sample_count, seed);
  auto out = kernel_check(kernel, points);
  // each series term is off by at most the worst norm ratio
  const KernelModel exact(kernel.m(), kernel.n(), kernel.c());
  out.predicted = (kernel.norms().cwiseQuotient(exact.norms()).array() - 1.0).abs().maxCoeff();
  return out;
}

namespace {

using RealPoint = std::vector<double>;

// central-difference stencils for derivative orders 1..4, all O(h^2)
struct Stencil {
  std::vector<int> offsets;
  std::vector<double> weights;
};

const Stencil& stencil(int order) {
  static const std::map<int, Stencil> table{
      {1, {{-1, 1}, {-0.5, 0.5}}},
      {2, {{-1, 0, 1}, {1.0, -2.0, 1.0}}},
      {3, {{-2, -1, 1, 2}, {-0.5, 1.0, -1.0, 0.5}}},
      {4, {{-2, -1, 0, 1, 2}, {1.0, -4.0, 6.0, -4.0, 1.0}}},
  };
  return table.at(order);
}

// Mixed real directional derivative D_{d_1} ... D_{d_k} f at x, repeated
// directions grouped into one higher-order stencil.
class Differentiator {
 public:
  Differentiator(std::function<double(const RealPoint&)> f, RealPoint x, double h)
      : f_(std::move(f)), x_(std::move(x)), h_(h) {}

  double operator()(std::vector<RealPoint> dirs) const {
    std::vector<std::pair<RealPoint, int>> groups;
    for (auto& d : dirs) {
      auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == d; });
      if (it == groups.end()) groups.emplace_back(std::move(d), 1);
      else ++it->second;
    }
    int total = 0;
    for (const auto& g : groups) total += g.second;
    return walk(groups, 0, x_) / std::pow(h_, total);
  }

 private:
  double walk(const std::vector<std::pair<RealPoint, int>>& groups, std::size_t g, const RealPoint& at) const {
    if (g == groups.size()) return f_(at);
    const auto& st = stencil(groups[g].second);
    double s = 0.0;
    for (std::size_t q = 0; q < st.offsets.size(); ++q) {
      RealPoint y = at;
      for (std::size_t k = 0; k < y.size(); ++k) y[k] += st.offsets[q] * h_ * groups[g].first[k];
      s += st.weights[q] * walk(groups, g + 1, y);
    }
    return s;
  }

  std::function<double(const RealPoint&)> f_;
  RealPoint x_;
  double h_;
};

// holomorphic sectional curvature from derivatives at one step size
double curvature_at_step(const KernelModel& kernel, const ComplexPoint& z, const ComplexPoint& Z, double h) {
  const std::size_t n = z.size();
  auto phi = [&](const RealPoint& x) {
    ComplexPoint w(n);
    for (std::size_t k = 0; k < n; ++k) w[k] = {x[k], x[n + k]};
    return kernel.potential(w);
  };
  RealPoint x(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    x[k] = z[k].real();
    x[n + k] = z[k].imag();
  }
  const Differentiator D(phi, x, h);
  // real directions of Z and iZ, and of the coordinate axes
  RealPoint a(2 * n), b(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    a[k] = Z[k].real();
    a[n + k] = Z[k].imag();
    b[k] = -Z[k].imag();
    b[n + k] = Z[k].real();
  }
  auto axis = [&](std::size_t k) {
    RealPoint e(2 * n, 0.0);
    e[k] = 1.0;
    return e;
  };

  const double gzz = 0.25 * (D({a, a}) + D({b, b}));
  const double fourth = (D({a, a, a, a}) + 2.0 * D({a, a, b, b}) + D({b, b, b, b})) / 16.0;

  Eigen::MatrixXcd H(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t q = 0; q < n; ++q) {
      const auto ar = axis(r), br = axis(n + r), aq = axis(q), bq = axis(n + q);
      H(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(q)) =
          0.25 * std::complex<double>(D({ar, aq}) + D({br, bq}), D({ar, bq}) - D({br, aq}));
    }
  Eigen::VectorXcd T(static_cast<Eigen::Index>(n));
  for (std::size_t q = 0; q < n; ++q) {
    const auto aq = axis(q), bq = axis(n + q);
    const double re = D({a, a, aq}) - D({b, b, aq}) + 2.0 * D({a, b, bq});
    const double im = D({a, a, bq}) - D({b, b, bq}) - 2.0 * D({a, b, aq});
    T[static_cast<Eigen::Index>(q)] = std::complex<double>(re, im) / 8.0;
  }
  // R(Z, Zbar, Z, Zbar) = -d_Z d_Zbar g(Z, Zbar) + g^{p qbar} d_Z g_{Z qbar} d_Zbar g_{p Zbar}
  const Eigen::MatrixXcd Hinv = H.inverse();
  const double quadratic = (T.adjoint() * Hinv.conjugate() * T)(0, 0).real();
  return (-fourth + quadratic) / (gzz * gzz);
}

}  // namespace

CurvatureSample sectional_curvature(const KernelModel& kernel, const ComplexPoint& point,
                                    const ComplexPoint& direction) {
  if (point.size() != direction.size() || point.size() != static_cast<std::size_t>(kernel.n()))
    throw ValidationError("point and direction must have dimension n");
  double dn = 0.0;
  for (const auto& d : direction) dn += std::norm(d);
  if (!(dn > 0.0)) throw ValidationError("direction must be nonzero");
  ComplexPoint Z = direction;
  for (auto& d : Z) d /= std::sqrt(dn);

  // Richardson on pairs (h, h/2); keep the step where consecutive
  // extrapolations agree best
  constexpr int kSteps = 9;
  std::vector<double> hs, raw;
  for (int k = 0; k < kSteps; ++k) {
    hs.push_back(0.2 * std::pow(0.5, k));
    raw.push_back(curvature_at_step(kernel, point, Z, hs.back()));
  }
  std::vector<double> rich;
  for (int k = 0; k + 1 < kSteps; ++k) rich.push_back((4.0 * raw[k + 1] - raw[k]) / 3.0);
  CurvatureSample s;
  s.point = point;
  s.direction = direction;
  s.disagreement = INFINITY;
  for (std::size_t k = 0; k + 1 < rich.size(); ++k) {
    const double d = std::abs(rich[k + 1] - rich[k]);
    if (d < s.disagreement) {
      s.disagreement = d;
      s.value = rich[k + 1];
      s.step = hs[k + 1];
    }
  }
  if (!std::isfinite(s.value) || s.disagreement > 1e-5 * std::max(1.0, std::abs(s.value))) {
    std::ostringstream msg;
    msg << "curvature estimates do not stabilise: best disagreement " << s.disagreement << " at step " << s.step;
    throw StepUnderflow(msg.str());
  }
  return s;
}

CurvatureCheck curvature_check(const KernelModel& kernel, const std::vector<ComplexPoint>& points,
                               const std::vector<ComplexPoint>& directions) {
  if (points.size() != directions.size()) throw ValidationError("need one direction per point");
  CurvatureCheck out;
  out.target = 2.0 / kernel.m();
  out.samples.resize(points.size());
  parallel_for(points.size(), [&](std::size_t k) { out.samples[k] = sectional_curvature(kernel, points[k], directions[k]); });
  for (const auto& s : out.samples) out.max_error = std::max(out.max_error, std::abs(s.value - out.target));
  out.pass = out.max_error <= 1e-4;
  return out;
}

CurvatureCheck curvature_check(const KernelModel& kernel, std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  const auto n = static_cast<std::size_t>(kernel.n());
  std::vector<ComplexPoint> points, dirs;
  for (std::size_t s = 0; s < count; ++s) {
    ComplexPoint z(n), d(n);
    double zn = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      z[k] = {rng.normal(), rng.normal()};
      d[k] = {rng.normal(), rng.normal()};
      zn += std::norm(z[k]);
    }
    const double radius = std::sqrt(rng.uniform()) / std::sqrt(zn);
    for (auto& zk : z) zk *= radius;
    points.push_back(z);
    dirs.push_back(d);
  }
  return curvature_check(kernel, points, dirs);
}

FamilyInvariant family_invariant(const ConstructedDomain& domain) {
  const auto pieces = domain.primitives();
  FamilyInvariant f;
  f.inf_S = min_S(pieces);
  const auto& p = domain.params;
  f.target = Coord(p.mu) * Coord(p.c) * Coord(p.s0);
  f.relative_error = to_double(abs(f.inf_S - f.target) / f.target);
  f.pass = f.relative_error <= 1e-12;
  return f;
}

std::optional<Point> tail_intersection_witness(const std::vector<const ConstructedDomain*>& domains) {
  if (domains.empty()) return std::nullopt;
  double t = 0.0;
  for (const auto* d : domains) t = std::max(t, d->background.tail.R + 1.0);
  const Point x(static_cast<std::size_t>(domains.front()->params.n), Coord(t));
  for (const auto* d : domains)
    if (!contains(Primitive(d->background.tail), x)) return std::nullopt;
  return x;
}

std::optional<AxisBox> symmetric_difference_witness(const ConstructedDomain& a, const ConstructedDomain& b) {
  const Coord la = a.background.simplex.lower_level(), ua = a.background.simplex.upper_level();
  const Coord lb = b.background.simplex.lower_level(), ub = b.background.simplex.upper_level();
  const int n = a.params.n;
  // S levels inside a's shell and outside b's
  std::vector<Coord> levels;
  if (la < lb) levels.push_back((la + std::min(ua, lb)) / 2);
  if (ub < ua) levels.push_back((std::max(la, ub) + ua) / 2);
  const auto others = b.primitives();
  for (const Coord& level : levels) {
    const Coord t = log(level / n) / 2;
    // half-width small against the gap between the levels
    const Coord gap = std::min(abs(level - la), std::min(abs(level - ua), std::min(abs(level - lb), abs(level - ub))));
    const Coord h = gap / level / 8;
    AxisBox cube{Point(static_cast<std::size_t>(n), t - h), Point(static_cast<std::size_t>(n), t + h)};
    const Coord lo = S_value(cube.lower), hi = S_value(cube.upper);
    if (!(la < lo && hi < ua)) continue;
    bool clear = true;
    for (const auto& piece : others) {
      try {
        if (!relate(Primitive(cube), piece).disjoint) clear = false;
      } catch (const Inconclusive&) {
        clear = false;
      }
      if (!clear) break;
    }
    if (clear) return cube;
  }
  return std::nullopt;
}

LiftCheck loglift_mc_check(const AxisBox& base, const MultiIndex& alpha, std::uint64_t seed, std::size_t samples) {
  const std::size_t n = base.dim();
  if (alpha.size() != n || !alpha.nonnegative()) throw ValidationError("alpha must be a nonnegative n-index");
  if (samples < 2) throw ValidationError("need at least two samples");
  std::vector<double> lo(n), hi(n);
  double log_volume = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    lo[j] = std::exp(to_double(base.lower[j]));
    hi[j] = std::exp(to_double(base.upper[j]));
    log_volume += 2.0 * std::log(2.0 * hi[j]);
  }
  // uniform samples in the enclosing product of squares, chunked for threads
  constexpr std::size_t kChunk = 1 << 16;
  const std::size_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<double> sum(chunks, 0.0), sum_sq(chunks, 0.0);
  parallel_for(chunks, [&](std::size_t c) {
    Rng rng(stream_seed(seed, c));
    const std::size_t count = std::min(kChunk, samples - c * kChunk);
    for (std::size_t s = 0; s < count; ++s) {
      double f = 1.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double x = rng.uniform(-hi[j], hi[j]), y = rng.uniform(-hi[j], hi[j]);
        const double r2 = x * x + y * y;
        if (!(lo[j] * lo[j] < r2 && r2 < hi[j] * hi[j])) f = 0.0;
        else f *= std::pow(r2, alpha[j]);
      }
      sum[c] += f;
      sum_sq[c] += f * f;
    }
  });
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    s1 += sum[c];
    s2 += sum_sq[c];
  }
  const double N = static_cast<double>(samples);
  const double mean = s1 / N;
  const double var = std::max(0.0, (s2 / N - mean * mean) * N / (N - 1.0));
  const double vol = std::exp(log_volume);

  LiftCheck out;
  out.samples = samples;
  out.monte_carlo = vol * mean;
  out.sigma = vol * std::sqrt(var / N);
  const IndexSet idx(alpha.degree(), static_cast<int>(n));
  out.exact = std::pow(kTwoPi, static_cast<double>(n)) *
              box_moment(idx, base)[static_cast<Eigen::Index>(*idx.position(alpha))];
  out.ratio = out.monte_carlo / out.exact;
  out.pass = std::abs(out.monte_carlo - out.exact) <= 3.0 * out.sigma;
  return out;
}

bool VerificationReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

std::string VerificationReport::failing() const {
  for (const auto& c : checks)
    if (!c.pass) return c.name;
  return {};
}

VerificationReport verify_domain(const ConstructedDomain& domain, const VerificationOptions& options) {
  VerificationReport r;
  const auto& p = domain.params;
  const IndexSet idx(p.m, p.n);

  r.audit = audit_moments(domain, options.tol_rel);
  {
    std::ostringstream d;
    d << "worst alpha " << idx[r.audit.worst].str() << " relative " << r.audit.relative[static_cast<Eigen::Index>(r.audit.worst)];
    r.checks.push_back({"moment audit", r.audit.pass, r.audit.residual, r.audit.bound, d.str()});
  }
  r.checks.push_back({"relative moment residual", r.audit.relative_residual <= 1e-6, r.audit.relative_residual, 1e-6,
                      "including certified error"});

  try {
    r.certificates = divergence_report(domain);
    bool ok = true;
    for (const auto& c : r.certificates) {
      const bool grows = c.kind == DivergenceCertificate::Kind::tail_growth ? c.exponent >= 0.0 : c.exponent <= -1.0;
      ok = ok && c.constant > 0.0 && grows;
    }
    r.checks.push_back({"divergence certificates", ok, static_cast<double>(r.certificates.size()), 0.0, ""});
  } catch (const MissingPrimitive& e) {
    r.checks.push_back({"divergence certificates", false, 0.0, 0.0, e.what()});
  }

  bool positive = r.audit.measured.minCoeff() > 0.0;
  if (positive) {
    const KernelModel measured(p.m, p.n, p.c, r.audit.measured);
    const auto kc = kernel_check(measured, domain, options.kernel_samples, options.seed);
    r.checks.push_back({"kernel identity (measured moments)", kc.pass, kc.max_deviation, 1e-6, ""});
    try {
      const auto cc = curvature_check(measured, options.curvature_pairs, options.seed + 1);
      r.checks.push_back({"holomorphic sectional curvature", cc.pass, cc.max_error, 1e-4,
                          "target " + std::to_string(cc.target)});
    } catch (const StepUnderflow& e) {
      r.checks.push_back({"holomorphic sectional curvature", false, 0.0, 1e-4, e.what()});
    }
  } else {
    r.checks.push_back({"kernel identity (measured moments)", false, 0.0, 1e-6, "nonpositive measured moment"});
  }
  {
    const KernelModel exact(p.m, p.n, p.c);
    Rng rng(options.seed + 2);
    std::vector<ComplexPoint> zs;
    for (std::size_t s = 0; s < options.kernel_samples; ++s) {
      ComplexPoint z(static_cast<std::size_t>(p.n));
      for (auto& zk : z) zk = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
      zs.push_back(z);
    }
    const auto kc = kernel_check(exact, zs);
    r.checks.push_back({"kernel identity (exact moments)", kc.max_deviation <= 1e-12, kc.max_deviation, 1e-12, ""});
  }

  const auto fam = family_invariant(domain);
  r.checks.push_back({"family invariant inf S = mu c s0", fam.pass, fam.relative_error, 1e-12,
                      "inf S " + std::to_string(to_double(fam.inf_S))});

  {
    Rng rng(options.seed + 3);
    bool ok = true;
    double worst = 0.0;
    for (std::size_t k = 0; k < options.lift_boxes; ++k) {
      std::vector<double> lo(static_cast<std::size_t>(p.n)), hi(static_cast<std::size_t>(p.n));
      for (std::size_t j = 0; j < lo.size(); ++j) {
        lo[j] = rng.uniform(-1.0, 0.5);
        hi[j] = lo[j] + rng.uniform(0.1, 1.0);
      }
      const auto& alpha = idx[rng.next() % idx.size()];
      const auto lc = loglift_mc_check(make_box(lo, hi), alpha, stream_seed(options.seed, 100 + k), options.lift_samples);
      ok = ok && lc.pass;
      worst = std::max(worst, std::abs(lc.monte_carlo - lc.exact) / lc.sigma);
    }
    r.checks.push_back({"lift identity", ok, worst, 3.0, "largest deviation in standard errors"});
  }
  return r;
}

}  // namespace bergman
