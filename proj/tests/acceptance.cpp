// One line per acceptance criterion; exit status is nonzero if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <unistd.h>

#include "bergman/box_ops.hpp"
#include "bergman/cli.hpp"
#include "bergman/density_quadrature.hpp"
#include "bergman/errors.hpp"
#include "bergman/random.hpp"

using namespace bergman;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Instance {
  int m, n;
  ConstructResult result;
  double construct_seconds = 0.0;
  std::string error;  // construction failure, empty on success
};

const std::vector<std::pair<int, int>> kShapes{{1, 2}, {2, 2}, {1, 3}, {3, 2}};

std::vector<Instance>& instances() {
  static std::vector<Instance> all = [] {
    std::vector<Instance> out;
    for (auto [m, n] : kShapes) {
      Instance inst{m, n, {}, 0.0, ""};
      ConstructConfig cfg;
      cfg.m = m;
      cfg.n = n;
      const auto t0 = Clock::now();
      try {
        inst.result = construct_domain(cfg);
      } catch (const Error& e) {
        inst.error = e.what();
      }
      inst.construct_seconds = seconds_since(t0);
      out.push_back(std::move(inst));
    }
    return out;
  }();
  return all;
}

std::string shape(const Instance& i) {
  return "(" + std::to_string(i.m) + "," + std::to_string(i.n) + ")";
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    pass = false;
    detail += (detail.empty() ? "" : "; ") + why;
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

Outcome end_to_end() {
  Outcome o;
  for (auto& inst : instances()) {
    if (!inst.error.empty()) {
      o.fail(shape(inst) + " construction failed: " + inst.error);
      continue;
    }
    const auto t0 = Clock::now();
    const auto report = verify_domain(inst.result.domain);
    const double total = inst.construct_seconds + seconds_since(t0);
    const double rel = report.audit.relative_residual;
    o.note(shape(inst) + " c=" + sci(inst.result.accepted_c) + " rel=" + sci(rel) + " " + sci(total) + "s");
    if (inst.result.accepted_c < 1e-8) o.fail(shape(inst) + " c below 1e-8");
    if (!report.pass()) o.fail(shape(inst) + " verify failed at " + report.failing());
    if (!(rel <= 1e-6)) o.fail(shape(inst) + " relative residual " + sci(rel));
    if (total > 300.0) o.fail(shape(inst) + " took " + sci(total) + "s");
  }
  return o;
}

Outcome density_identity() {
  Outcome o;
  for (auto [m, n] : kShapes) {
    const IndexSet idx(m, n);
    const auto t0 = Clock::now();
    const auto q = density_moment_quadrature(idx);
    const double secs = seconds_since(t0);
    const auto target = target_moment_vector(idx);
    const double worst = ((q.value - target).array() / target.array()).abs().maxCoeff();
    o.note("(" + std::to_string(m) + "," + std::to_string(n) + ") " + sci(worst));
    if (!(worst <= 1e-6)) o.fail("relative error " + sci(worst));
    if (secs > 30.0) o.fail("took " + sci(secs) + "s");
  }
  return o;
}

Outcome tail_bracket_and_certificates() {
  Outcome o;
  for (auto& inst : instances()) {
    if (!inst.error.empty()) {
      o.fail(shape(inst) + " not constructed");
      continue;
    }
    const auto& d = inst.result.domain;
    const IndexSet idx(inst.m, inst.n);
    const auto& tail = d.background.tail;
    const auto moment = tail_moment(tail, idx);
    double margin = INFINITY;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const auto b = tail_bracket(idx[k], inst.m, tail);
      const auto e = static_cast<Eigen::Index>(k);
      const double lo = moment.value[e] - moment.error[e], hi = moment.value[e] + moment.error[e];
      if (!(b.lower < lo && hi < b.upper)) o.fail(shape(inst) + " alpha " + idx[k].str() + " outside its bracket");
      margin = std::min({margin, lo / b.lower - 1.0, 1.0 - hi / b.upper});
    }
    std::size_t top = 0;
    for (const auto& c : divergence_report(d)) {
      if (!c.alpha.nonnegative() || c.alpha.degree() != inst.m + 1) continue;
      ++top;
      if (!(c.constant > 0.0 && c.exponent >= 0.0)) o.fail(shape(inst) + " bad certificate for " + c.alpha.str());
    }
    if (top != multi_indices_of_degree(inst.m + 1, inst.n).size()) o.fail(shape(inst) + " missing certificates");
    o.note(shape(inst) + " margin " + sci(margin) + ", " + std::to_string(top) + " certificates");
  }
  return o;
}

Eigen::MatrixXd random_matrix(Rng& rng, int n) {
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
  return a;
}

Outcome synthetic_solver() {
  Outcome o;
  double worst_factor = 0.0, worst_residual = 0.0, worst_gap = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Rng rng(stream_seed(2024, seed));
    const int n = 2 + static_cast<int>(seed % 7);
    // well-conditioned L, smooth perturbation eps sin(B tau) with eps |B| |L^-1| = 0.45
    const Eigen::MatrixXd L = 2.0 * Eigen::MatrixXd::Identity(n, n) + 0.3 * random_matrix(rng, n);
    const Eigen::MatrixXd B = random_matrix(rng, n);
    Eigen::VectorXd g0(n);
    for (int i = 0; i < n; ++i) g0[i] = rng.uniform(-0.1, 0.1);
    const double linv = 1.0 / Eigen::JacobiSVD<Eigen::MatrixXd>(L).singularValues().minCoeff();
    const double bnorm = Eigen::JacobiSVD<Eigen::MatrixXd>(B).singularValues()(0);
    const double eps = 0.45 / (linv * bnorm);

    BrouwerProblem p;
    p.G = [&](const Eigen::VectorXd& t) -> Eigen::VectorXd { return L * t + g0 + eps * (B * t).array().sin().matrix(); };
    p.DG = [&](const Eigen::VectorXd& t) -> Eigen::MatrixXd {
      return L + eps * (B * t).array().cos().matrix().asDiagonal() * B;
    };
    p.L = L;
    p.A0 = Eigen::VectorXd::Zero(n);
    p.r = 1.0;
    try {
      const auto rep = brouwer_solve(p, {.tol = 1e-12, .max_iter = 200, .samples = 1000, .seed = seed});
      // Newton from the origin as the independent root
      Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
      for (int k = 0; k < 60; ++k) x -= p.DG(x).lu().solve(p.G(x));
      worst_factor = std::max(worst_factor, rep.contraction);
      worst_residual = std::max(worst_residual, rep.residual);
      worst_gap = std::max(worst_gap, (rep.tau - x).norm());
      if (!rep.converged) o.fail("seed " + std::to_string(seed) + " did not converge");
    } catch (const Error& e) {
      o.fail("seed " + std::to_string(seed) + ": " + e.what());
    }
  }
  if (!(worst_residual <= 1e-12)) o.fail("residual " + sci(worst_residual));
  if (!(worst_factor <= 0.5 + 1e-6)) o.fail("factor " + sci(worst_factor));
  if (!(worst_gap <= 1e-10)) o.fail("Newton gap " + sci(worst_gap));
  o.note("worst residual " + sci(worst_residual) + ", factor " + sci(worst_factor) + ", Newton gap " + sci(worst_gap));
  return o;
}

Outcome jacobian_fidelity() {
  Outcome o;
  for (auto& inst : instances()) {
    if (!inst.error.empty()) {
      o.fail(shape(inst) + " not constructed");
      continue;
    }
    const auto& d = inst.result.domain;
    const auto& p = d.params;
    const MomentMap psi(d.background, d.decomposition);
    const auto N = static_cast<int>(p.N);
    Rng rng(stream_seed(5, static_cast<std::uint64_t>(inst.m * 10 + inst.n)));
    double worst_rel = 0.0, worst_dev = 0.0;
    bool blocks = true;
    for (int s = 0; s < 50; ++s) {
      Eigen::VectorXd tau(N);
      for (int k = 0; k < N; ++k) tau[k] = rng.normal();
      tau *= 0.9 * p.r_c * std::pow(rng.uniform(), 1.0 / N) / tau.norm();
      const Eigen::MatrixXd J = psi.jacobian(tau);
      const double h = 1e-3 * p.r_c;
      const auto times = psi.family().times(tau);
      for (int k = 0; k < N; ++k) {
        Eigen::VectorXd up = tau, dn = tau;
        up[k] += h;
        dn[k] -= h;
        const Eigen::VectorXd fd = (psi.residual(up) - psi.residual(dn)) / (2 * h);
        worst_rel = std::max(worst_rel, (fd - J.col(k)).norm() / J.col(k).norm());
        // moving tau_k changes box k alone, so its other partials vanish
        const auto moved = psi.family().times(up);
        for (std::size_t j = 0; j < moved.size(); ++j)
          if (j != static_cast<std::size_t>(k) && moved[j] != times[j]) blocks = false;
      }
      worst_dev = std::max(worst_dev, (J - psi.model()).cwiseAbs().maxCoeff());
    }
    if (!(worst_rel <= 1e-5)) o.fail(shape(inst) + " FD error " + sci(worst_rel));
    if (!blocks) o.fail(shape(inst) + " a box responds to another coordinate");
    if (!(worst_dev <= p.lambda_hat)) o.fail(shape(inst) + " deviation " + sci(worst_dev) + " > " + sci(p.lambda_hat));
    o.note(shape(inst) + " FD " + sci(worst_rel) + ", |J-L| " + sci(worst_dev) + " <= " + sci(p.lambda_hat));
  }
  return o;
}

Outcome kernel_identity() {
  Outcome o;
  for (auto& inst : instances()) {
    if (!inst.error.empty()) {
      o.fail(shape(inst) + " not constructed");
      continue;
    }
    const auto& d = inst.result.domain;
    const auto audit = audit_moments(d);
    const KernelModel measured(inst.m, inst.n, d.c(), audit.measured);
    const auto kc = kernel_check(measured, d, 1000, 3);
    const KernelModel exact(inst.m, inst.n, d.c());
    Rng rng(4);
    std::vector<ComplexPoint> zs;
    for (int s = 0; s < 1000; ++s) {
      ComplexPoint z(static_cast<std::size_t>(inst.n));
      for (auto& zk : z) zk = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
      zs.push_back(z);
    }
    const auto ke = kernel_check(exact, zs);
    if (!(kc.max_deviation <= 1e-6)) o.fail(shape(inst) + " measured " + sci(kc.max_deviation));
    if (!(ke.max_deviation <= 1e-12)) o.fail(shape(inst) + " exact " + sci(ke.max_deviation));
    o.note(shape(inst) + " " + sci(kc.max_deviation) + " / " + sci(ke.max_deviation));
  }
  return o;
}

Outcome curvature() {
  Outcome o;
  for (auto& inst : instances()) {
    if (!inst.error.empty()) {
      o.fail(shape(inst) + " not constructed");
      continue;
    }
    const auto& d = inst.result.domain;
    const KernelModel measured(inst.m, inst.n, d.c(), audit_moments(d).measured);
    try {
      const auto cc = curvature_check(measured, 20, 6);
      if (!cc.pass) o.fail(shape(inst) + " error " + sci(cc.max_error));
      o.note(shape(inst) + " max |K - 2/m| " + sci(cc.max_error));
    } catch (const StepUnderflow& e) {
      o.fail(shape(inst) + " " + e.what());
    }
  }
  return o;
}

Outcome mu_family() {
  Outcome o;
  const std::vector<double> grid{0.2, 0.4, 0.6, 0.8};
  ConstructConfig cfg;
  cfg.mu = grid.front();
  std::vector<ConstructedDomain> family;
  try {
    const auto first = construct_domain(cfg);
    cfg.c_initial = cfg.c_floor = first.accepted_c;
    cfg.decomposition = first.domain.decomposition;
    family.push_back(first.domain);
    for (std::size_t k = 1; k < grid.size(); ++k) {
      cfg.mu = grid[k];
      family.push_back(construct_domain(cfg).domain);
    }
  } catch (const Error& e) {
    o.fail(std::string("construction failed: ") + e.what());
    return o;
  }
  double worst = 0.0;
  std::vector<const ConstructedDomain*> ptrs;
  for (std::size_t k = 0; k < family.size(); ++k) {
    ptrs.push_back(&family[k]);
    const auto f = family_invariant(family[k]);
    worst = std::max(worst, f.relative_error);
    if (!f.pass) o.fail("mu " + sci(grid[k]) + " relative " + sci(f.relative_error));
    if (k > 0 && !(family_invariant(family[k - 1]).inf_S < f.inf_S)) o.fail("inf S not increasing at " + sci(grid[k]));
  }
  const auto w = tail_intersection_witness(ptrs);
  if (!w) {
    o.fail("no tail witness");
  } else {
    for (const auto* d : ptrs)
      if (!contains(Primitive(d->background.tail), *w)) o.fail("tail witness outside a tail");
  }
  std::size_t found = 0;
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t j = i + 1; j < family.size(); ++j) {
      const auto box = symmetric_difference_witness(family[i], family[j]);
      if (!box) {
        o.fail("no symmetric-difference witness for " + sci(grid[i]) + ", " + sci(grid[j]));
        continue;
      }
      const Point mid = box->center();
      bool in_a = false, in_b = false;
      for (const auto& p : family[i].primitives()) in_a = in_a || contains(p, mid);
      for (const auto& p : family[j].primitives()) in_b = in_b || contains(p, mid);
      if (in_a && !in_b) ++found;
      else o.fail("witness centre misplaced for " + sci(grid[i]) + ", " + sci(grid[j]));
    }
  o.note("c=" + sci(family.front().c()) + ", worst relative " + sci(worst) + ", " + std::to_string(found) + "/6 witnesses");
  return o;
}

Outcome lift_identity() {
  Outcome o;
  Rng rng(9);
  for (int k = 0; k < 5; ++k) {
    const int n = 2 + k % 2;
    std::vector<double> lo(static_cast<std::size_t>(n)), hi(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      lo[static_cast<std::size_t>(j)] = rng.uniform(-1.0, 0.5);
      hi[static_cast<std::size_t>(j)] = lo[static_cast<std::size_t>(j)] + rng.uniform(0.1, 1.0);
    }
    const IndexSet idx(2, n);
    const auto& alpha = idx[rng.next() % idx.size()];
    const auto lc = loglift_mc_check(make_box(lo, hi), alpha, stream_seed(9, static_cast<std::uint64_t>(k)), 10'000'000);
    const double z = (lc.monte_carlo - lc.exact) / lc.sigma;
    if (!lc.pass) o.fail("box " + std::to_string(k) + " off by " + sci(z) + " sigma");
    o.note("ratio " + sci(lc.ratio) + " (" + sci(z) + " sigma)");
  }
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  Outcome o;
  const auto root = fs::temp_directory_path() / ("bergman_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  std::size_t compared = 0;
  for (const char* run : {"first", "second"}) {
    const auto dir = (root / run).string();
    std::ostringstream out, err;
    const std::vector<std::vector<std::string>> commands{
        {"construct", "--m", "1", "--n", "2", "--seed", "7", "--out", dir + "/construct"},
        {"verify", dir + "/construct/geometry.json", "--lift-samples", "100000", "--out", dir + "/verify"},
        {"decompose", "--m", "2", "--n", "2", "--seed", "7", "--out", dir + "/decompose"},
        {"sweep-mu", "--m", "1", "--n", "2", "--out", dir + "/sweep"},
    };
    for (const auto& args : commands)
      if (run_cli(args, out, err) != kExitOk) o.fail(args.front() + " failed in the " + run + " run");
  }
  for (const auto& entry : fs::recursive_directory_iterator(root / "first")) {
    if (entry.path().extension() != ".json") continue;
    const auto twin = root / "second" / fs::relative(entry.path(), root / "first");
    ++compared;
    if (slurp(entry.path()) != slurp(twin)) o.fail(fs::relative(entry.path(), root / "first").string() + " differs");
  }
  if (compared == 0) o.fail("no JSON artifacts");
  o.note(std::to_string(compared) + " JSON files compared");
  fs::remove_all(root);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"end-to-end construction and verification", end_to_end},
      {"density quadrature reproduces A", density_identity},
      {"tail bracket and divergence certificates", tail_bracket_and_certificates},
      {"fixed-point solver on 100 synthetic problems", synthetic_solver},
      {"Jacobian fidelity", jacobian_fidelity},
      {"kernel identity", kernel_identity},
      {"holomorphic sectional curvature 2/m", curvature},
      {"mu-family invariant and witnesses", mu_family},
      {"lift identity by Monte Carlo", lift_identity},
      {"determinism of JSON artifacts", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failed += o.pass ? 0 : 1;
    std::printf("criterion %zu %s: %s [%.1fs] %s\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first.c_str(),
                seconds_since(t0), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
