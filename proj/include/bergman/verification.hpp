#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bergman/construct.hpp"
#include "bergman/divergence.hpp"

namespace bergman {

using ComplexPoint = std::vector<std::complex<double>>;

// Moments of the solved domain recomputed from its pieces.
struct MomentAudit {
  MomentVector measured;
  MomentVector error;        // certified bound on |exact - measured|
  MomentVector target;       // cA
  MomentVector relative;     // |measured - target| / target per alpha
  double residual = 0.0;     // |measured - target|
  double relative_residual = 0.0;  // (residual + |error|) / |cA|
  double bound = 0.0;        // 10 (solver tolerance + certified error)
  std::size_t worst = 0;     // index of the largest relative entry
  bool pass = false;
};

// Recomputes with a tighter shell budget than the construction used, so the
// curved pieces get different quadrature orders.
MomentAudit audit_moments(const ConstructedDomain& domain, double tol_rel = 1e-12);

// Certificates for every |alpha| = m+1 and, for each coordinate i, for
// alpha = -e_i and alpha = -e_i + (m+1) e_{i+1}. Throws MissingPrimitive.
std::vector<DivergenceCertificate> divergence_report(const ConstructedDomain& domain);

// K(z) = (1/c)(1 + |z|^2)^m and its monomial expansion
// sum_alpha |z^alpha|^2 / norms_alpha, norms_alpha = (2 pi)^n (moment)_alpha.
class KernelModel {
 public:
  // exact norms (2 pi)^n c A_alpha
  KernelModel(int m, int n, double c);
  // measured moments in place of c A
  KernelModel(int m, int n, double c, const MomentVector& moments);

  int m() const { return idx_.m(); }
  int n() const { return idx_.n(); }
  double c() const { return c_; }
  double closed_form(const ComplexPoint& z) const;
  double series(const ComplexPoint& z) const;
  // log of the series form; potential of the metric
  double potential(const ComplexPoint& z) const;
  const MomentVector& norms() const { return norms_; }

 private:
  IndexSet idx_;
  double c_;
  MomentVector norms_;
};

struct KernelCheck {
  double max_deviation = 0.0;    // max |series/closed - 1|
  double predicted = 0.0;        // max_alpha |measured/exact - 1|
  std::size_t samples = 0;
  bool pass = false;             // max_deviation <= 1e-6
};

// Seeded points on the lift of the solved boxes.
std::vector<ComplexPoint> lifted_samples(const ConstructedDomain& domain, std::size_t count, std::uint64_t seed);

// z drawn by lifted_samples.
KernelCheck kernel_check(const KernelModel& kernel, const ConstructedDomain& domain, std::size_t sample_count,
                         std::uint64_t seed);
KernelCheck kernel_check(const KernelModel& kernel, const std::vector<ComplexPoint>& points);

struct CurvatureSample {
  ComplexPoint point;
  ComplexPoint direction;
  double value = 0.0;
  double step = 0.0;          // chosen finite-difference step
  double disagreement = 0.0;  // between consecutive Richardson estimates
};

struct CurvatureCheck {
  std::vector<CurvatureSample> samples;
  double target = 0.0;  // 2/m
  double max_error = 0.0;
  bool pass = false;    // all within 1e-4
};

// Holomorphic sectional curvature of the metric with potential log K along
// `direction`, from central differences with Richardson extrapolation.
// Throws StepUnderflow when no step gives consistent estimates.
CurvatureSample sectional_curvature(const KernelModel& kernel, const ComplexPoint& point,
                                    const ComplexPoint& direction);
CurvatureCheck curvature_check(const KernelModel& kernel, const std::vector<ComplexPoint>& points,
                               const std::vector<ComplexPoint>& directions);
// `count` seeded random points with |z| <= 1 and unit directions.
CurvatureCheck curvature_check(const KernelModel& kernel, std::size_t count, std::uint64_t seed);

struct FamilyInvariant {
  Coord inf_S = 0;        // over every piece, equal to inf |z|^2 on the lift
  Coord target = 0;       // mu c s0
  double relative_error = 0.0;
  bool pass = false;      // relative_error <= 1e-12
};

FamilyInvariant family_invariant(const ConstructedDomain& domain);

// Diagonal point deep inside every tail; nullopt if some domain lacks one.
std::optional<Point> tail_intersection_witness(const std::vector<const ConstructedDomain*>& domains);
// Small box inside `a` and disjoint from every piece of `b`, found between the
// two log-simplex shells; nullopt if none is found.
std::optional<AxisBox> symmetric_difference_witness(const ConstructedDomain& a, const ConstructedDomain& b);

struct LiftCheck {
  double monte_carlo = 0.0;  // integral of |z^alpha|^2 over the lift
  double sigma = 0.0;        // standard error of the estimate
  double exact = 0.0;        // (2 pi)^n times the box moment
  double ratio = 0.0;
  std::size_t samples = 0;
  bool pass = false;         // |mc - exact| <= 3 sigma
};

LiftCheck loglift_mc_check(const AxisBox& base, const MultiIndex& alpha, std::uint64_t seed,
                           std::size_t samples = 10'000'000);

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double bound = 0.0;
  std::string detail;
};

struct VerificationOptions {
  std::uint64_t seed = 2;
  std::size_t kernel_samples = 1000;
  std::size_t curvature_pairs = 20;
  std::size_t lift_boxes = 5;
  std::size_t lift_samples = 10'000'000;
  double tol_rel = 1e-12;
};

struct VerificationReport {
  std::vector<CheckResult> checks;
  MomentAudit audit;
  std::vector<DivergenceCertificate> certificates;
  bool pass() const;
  // first failing check, empty if none
  std::string failing() const;
};

VerificationReport verify_domain(const ConstructedDomain& domain, const VerificationOptions& options = {});

}  // namespace bergman
