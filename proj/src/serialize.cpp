#include "bergman/serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "bergman/errors.hpp"

namespace bergman {

namespace {

template <class... F>
struct overloaded : F... {
  using F::operator()...;
};

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  return j.at(key);
}

template <class T>
T get(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("field '") + key + "': " + e.what());
  }
}

Json vector_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const Json& j) {
  if (!j.is_array()) throw ParseError("expected a number array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ParseError("expected a number");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Json box_json(const AxisBox& b) { return Json{{"lower", to_json(b.lower)}, {"upper", to_json(b.upper)}}; }

AxisBox box_from_json(const Json& j) {
  AxisBox b{point_from_json(field(j, "lower")), point_from_json(field(j, "upper"))};
  if (b.lower.size() != b.upper.size()) throw ParseError("box corners differ in dimension");
  return b;
}

BoxChainCorridor corridor_from_json(const Json& j) {
  BoxChainCorridor c;
  c.name = get<std::string>(j, "name");
  for (const auto& s : field(j, "segments")) c.segments.push_back(box_from_json(s));
  c.entry = point_from_json(field(j, "entry"));
  c.exit = point_from_json(field(j, "exit"));
  return c;
}

template <class T>
T as(const Primitive& p, const char* what) {
  if (const auto* x = std::get_if<T>(&p)) return *x;
  throw ParseError(std::string("expected a ") + what);
}

}  // namespace

Json to_json(const Coord& x) {
  Json out = Json::array();
  for (double d : split_exact(x)) out.push_back(d);
  return out;
}

Json to_json(const Point& p) {
  Json out = Json::array();
  for (const auto& x : p) out.push_back(to_json(x));
  return out;
}

Coord coord_from_json(const Json& j) {
  if (j.is_number()) return Coord(j.get<double>());
  if (!j.is_array()) throw ParseError("expected a coordinate");
  std::vector<double> parts;
  for (const auto& d : j) {
    if (!d.is_number()) throw ParseError("coordinate parts must be numbers");
    parts.push_back(d.get<double>());
  }
  return sum_exact(parts);
}

Point point_from_json(const Json& j) {
  if (!j.is_array()) throw ParseError("expected a point");
  Point p;
  for (const auto& x : j) p.push_back(coord_from_json(x));
  return p;
}

Json to_json(const Primitive& p) {
  Json out{{"kind", kind_name(p)}};
  std::visit(overloaded{
                 [&](const AxisBox& b) {
                   out["lower"] = to_json(b.lower);
                   out["upper"] = to_json(b.upper);
                 },
                 [&](const SphericalShell& s) {
                   out["n"] = s.n;
                   out["r_mid"] = s.r_mid;
                   out["width"] = s.width;
                 },
                 [&](const TailRegion& t) {
                   out["n"] = t.n;
                   out["R"] = t.R;
                   out["gamma"] = t.gamma;
                 },
                 [&](const LogSimplexShell& t) {
                   out["n"] = t.n;
                   out["mu"] = t.mu;
                   out["c"] = t.c;
                   out["s0"] = t.s0;
                 },
                 [&](const BoxChainCorridor& c) {
                   out["name"] = c.name;
                   Json segs = Json::array();
                   for (const auto& s : c.segments) segs.push_back(box_json(s));
                   out["segments"] = std::move(segs);
                   out["entry"] = to_json(c.entry);
                   out["exit"] = to_json(c.exit);
                 },
             },
             p);
  return out;
}

Primitive primitive_from_json(const Json& j) {
  const auto kind = get<std::string>(j, "kind");
  const Primitive probe[] = {AxisBox{}, SphericalShell{}, TailRegion{}, LogSimplexShell{}, BoxChainCorridor{}};
  if (kind == kind_name(probe[0])) return box_from_json(j);
  if (kind == kind_name(probe[1])) return SphericalShell{get<int>(j, "n"), get<double>(j, "r_mid"), get<double>(j, "width")};
  if (kind == kind_name(probe[2])) return TailRegion{get<int>(j, "n"), get<double>(j, "R"), get<double>(j, "gamma")};
  if (kind == kind_name(probe[3]))
    return LogSimplexShell{get<int>(j, "n"), get<double>(j, "mu"), get<double>(j, "c"), get<double>(j, "s0")};
  if (kind == kind_name(probe[4])) return corridor_from_json(j);
  throw ParseError("unknown primitive kind '" + kind + "'");
}

Json to_json(const RunParameters& p) {
  Json conditions = Json::array();
  for (const auto& c : p.conditions)
    conditions.push_back({{"name", c.name}, {"value", c.value}, {"bound", c.bound}, {"pass", c.pass}});
  return Json{{"m", p.m},
              {"n", p.n},
              {"c", p.c},
              {"mu", p.mu},
              {"beta", p.beta},
              {"growth", growth_name(p.growth)},
              {"N", p.N},
              {"M", p.M},
              {"eps", p.eps},
              {"sigma", p.sigma},
              {"delta", p.delta},
              {"rho", p.rho},
              {"max_point_norm", p.max_point_norm},
              {"radius_b1", p.radius_b1},
              {"radius_b2", p.radius_b2},
              {"kappa1", p.kappa1},
              {"kappa2", p.kappa2},
              {"s", p.s},
              {"s0", p.s0},
              {"a_star", p.a_star},
              {"r_c", p.r_c},
              {"t0", p.t0},
              {"lambda_hat", p.lambda_hat},
              {"lambda_c", p.lambda_c},
              {"conditions", conditions}};
}

RunParameters run_parameters_from_json(const Json& j) {
  RunParameters p;
  p.m = get<int>(j, "m");
  p.n = get<int>(j, "n");
  p.c = get<double>(j, "c");
  p.mu = get<double>(j, "mu");
  p.beta = get<double>(j, "beta");
  p.growth = parse_growth(get<std::string>(j, "growth"));
  p.N = get<std::size_t>(j, "N");
  p.M = get<std::size_t>(j, "M");
  p.eps = get<double>(j, "eps");
  p.sigma = get<double>(j, "sigma");
  p.delta = get<double>(j, "delta");
  p.rho = get<double>(j, "rho");
  p.max_point_norm = get<double>(j, "max_point_norm");
  p.radius_b1 = get<double>(j, "radius_b1");
  p.radius_b2 = get<double>(j, "radius_b2");
  p.kappa1 = get<double>(j, "kappa1");
  p.kappa2 = get<double>(j, "kappa2");
  p.s = get<double>(j, "s");
  p.s0 = get<double>(j, "s0");
  p.a_star = get<double>(j, "a_star");
  p.r_c = get<double>(j, "r_c");
  p.t0 = get<std::vector<double>>(j, "t0");
  p.lambda_hat = get<double>(j, "lambda_hat");
  p.lambda_c = get<double>(j, "lambda_c");
  for (const auto& c : field(j, "conditions"))
    p.conditions.push_back({get<std::string>(c, "name"), get<double>(c, "value"), get<double>(c, "bound"),
                            get<bool>(c, "pass")});
  if (p.n < 2 || p.m < 1) throw ValidationError("run parameters need n >= 2 and m >= 1");
  if (!(p.c > 0.0 && p.c < 1.0) || !(p.mu > 0.0 && p.mu < 1.0)) throw ValidationError("c and mu must lie in (0,1)");
  if (p.t0.size() != p.M) throw ValidationError("t0 must have one entry per point");
  return p;
}

Json to_json(const ConeDecomposition& d) {
  Json points = Json::array();
  for (const auto& p : d.points) points.push_back(p);
  return Json{{"m", d.m},
              {"n", d.n},
              {"points", points},
              {"weights", vector_json(d.weights)},
              {"pivot_order", d.pivot_order},
              {"strict_margin", d.strict_margin},
              {"L_inv_norm", d.L_inv_norm},
              {"condition", d.condition}};
}

ConeDecomposition decomposition_from_json(const Json& j) {
  ConeDecomposition d;
  d.m = get<int>(j, "m");
  d.n = get<int>(j, "n");
  if (d.n < 2 || d.m < 1) throw ValidationError("decomposition needs n >= 2 and m >= 1");
  d.points = get<std::vector<std::vector<double>>>(j, "points");
  d.weights = vector_from_json(field(j, "weights"));
  d.pivot_order = get<std::vector<std::size_t>>(j, "pivot_order");
  d.strict_margin = get<double>(j, "strict_margin");
  const IndexSet idx(d.m, d.n);
  if (d.points.size() < idx.size()) throw ValidationError("decomposition has fewer points than moments");
  if (static_cast<std::size_t>(d.weights.size()) != d.points.size() || d.pivot_order.size() != d.points.size())
    throw ValidationError("decomposition needs one weight and one pivot entry per point");
  for (const auto& p : d.points)
    if (p.size() != static_cast<std::size_t>(d.n)) throw ValidationError("decomposition point has the wrong dimension");
  for (Eigen::Index k = 0; k < d.weights.size(); ++k)
    if (!(d.weights[k] > 0.0) || !std::isfinite(d.weights[k]))
      throw ValidationError("decomposition weights must be positive and finite");
  std::vector<std::size_t> first(idx.size());
  for (std::size_t k = 0; k < first.size(); ++k) first[k] = k;
  auto out = with_pivots(d, first);
  if (!std::isfinite(out.L_inv_norm)) throw ValidationError("pivot matrix is singular");
  return out;
}

Json to_json(const CertifiedMoment& m) { return Json{{"value", vector_json(m.value)}, {"error", vector_json(m.error)}}; }

Json to_json(const DivergenceCertificate& c) {
  return Json{{"alpha", c.alpha.entries()},
              {"kind", c.kind == DivergenceCertificate::Kind::tail_growth ? "tail_growth" : "simplex_face"},
              {"constant", c.constant},
              {"exponent", c.exponent},
              {"start", c.start},
              {"coordinate", c.coordinate},
              {"description", c.description}};
}

Json to_json(const AssembledBackground& bg) {
  Json anchors = Json::array(), skeleton = Json::array(), budgets = Json::array(), certs = Json::array();
  for (const auto& u : bg.anchors) anchors.push_back(to_json(Primitive(u)));
  for (const auto& g : bg.skeleton) skeleton.push_back(to_json(Primitive(g)));
  for (const auto& e : bg.budget_report)
    budgets.push_back({{"piece", e.piece}, {"norm", e.norm}, {"error", e.error}, {"budget", e.budget},
                       {"cap", e.cap}, {"pass", e.pass}});
  for (const auto& c : bg.certificates) certs.push_back(to_json(c));
  return Json{{"hub", to_json(Primitive(bg.hub))},
              {"tail", to_json(Primitive(bg.tail))},
              {"tail_corridor", to_json(Primitive(bg.tail_corridor))},
              {"simplex", to_json(Primitive(bg.simplex))},
              {"simplex_corridor", to_json(Primitive(bg.simplex_corridor))},
              {"anchors", anchors},
              {"skeleton", skeleton},
              {"moment", to_json(bg.moment)},
              {"fragments", bg.fragments},
              {"budget_report", budgets},
              {"certificates", certs},
              {"connected", bg.connected}};
}

Json to_json(const ConstructedDomain& d) {
  Json boxes = Json::array();
  for (const auto& b : d.boxes) boxes.push_back(to_json(Primitive(b)));
  return Json{{"format", "bergman-forge domain 1"},
              {"params", to_json(d.params)},
              {"decomposition", to_json(d.decomposition)},
              {"background", to_json(d.background)},
              {"tau_star", vector_json(d.tau_star)},
              {"times", d.times},
              {"boxes", boxes},
              {"solver_residual", d.solver_residual},
              {"certified_error", d.certified_error}};
}

ConstructedDomain domain_from_json(const Json& j) {
  if (get<std::string>(j, "format") != "bergman-forge domain 1") throw ParseError("not a domain file");
  ConstructedDomain d;
  d.params = run_parameters_from_json(field(j, "params"));
  d.decomposition = decomposition_from_json(field(j, "decomposition"));
  const Json& b = field(j, "background");
  auto& bg = d.background;
  bg.params = d.params;
  bg.hub = as<SphericalShell>(primitive_from_json(field(b, "hub")), "shell");
  bg.tail = as<TailRegion>(primitive_from_json(field(b, "tail")), "tail");
  bg.tail_corridor = as<BoxChainCorridor>(primitive_from_json(field(b, "tail_corridor")), "corridor");
  bg.simplex = as<LogSimplexShell>(primitive_from_json(field(b, "simplex")), "log-simplex shell");
  bg.simplex_corridor = as<BoxChainCorridor>(primitive_from_json(field(b, "simplex_corridor")), "corridor");
  for (const auto& u : field(b, "anchors")) bg.anchors.push_back(as<AxisBox>(primitive_from_json(u), "box"));
  for (const auto& g : field(b, "skeleton")) bg.skeleton.push_back(as<BoxChainCorridor>(primitive_from_json(g), "corridor"));
  const Json& m = field(b, "moment");
  bg.moment = {vector_from_json(field(m, "value")), vector_from_json(field(m, "error"))};
  bg.fragments = get<std::size_t>(b, "fragments");
  for (const auto& e : field(b, "budget_report"))
    bg.budget_report.push_back({get<std::string>(e, "piece"), get<double>(e, "norm"), get<double>(e, "error"),
                                get<double>(e, "budget"), get<double>(e, "cap"), get<bool>(e, "pass")});
  bg.connected = get<bool>(b, "connected");
  for (const auto& c : field(b, "certificates")) {
    DivergenceCertificate cert;
    cert.alpha = MultiIndex(get<std::vector<int>>(c, "alpha"));
    cert.kind = get<std::string>(c, "kind") == "tail_growth" ? DivergenceCertificate::Kind::tail_growth
                                                             : DivergenceCertificate::Kind::simplex_face;
    cert.constant = get<double>(c, "constant");
    cert.exponent = get<double>(c, "exponent");
    cert.start = get<double>(c, "start");
    cert.coordinate = get<std::size_t>(c, "coordinate");
    cert.description = get<std::string>(c, "description");
    bg.certificates.push_back(std::move(cert));
  }
  d.tau_star = vector_from_json(field(j, "tau_star"));
  d.times = get<std::vector<double>>(j, "times");
  for (const auto& w : field(j, "boxes")) d.boxes.push_back(as<AxisBox>(primitive_from_json(w), "box"));
  d.solver_residual = get<double>(j, "solver_residual");
  d.certified_error = get<double>(j, "certified_error");

  const auto n = static_cast<std::size_t>(d.params.n);
  for (const auto& p : d.primitives())
    if (static_cast<std::size_t>(dimension(p)) != n) throw ValidationError("piece dimension does not match n");
  if (d.boxes.size() != d.params.M) throw ValidationError("need one solved box per decomposition point");
  return d;
}

Json to_json(const ConstructResult& r) {
  const auto& s = r.report;
  Json log = Json::array();
  for (const auto& it : s.log)
    log.push_back({{"iteration", it.iteration}, {"residual", it.residual}, {"step", it.step}, {"tau", vector_json(it.tau)}});
  Json attempts = Json::array();
  for (const auto& a : r.attempts) attempts.push_back({{"c", a.c}, {"failure", a.failure}});
  const auto& h = r.hypotheses;
  return Json{{"accepted_c", r.accepted_c},
              {"converged", s.converged},
              {"tau_star", vector_json(s.tau)},
              {"iterations", s.iterations},
              {"residual", s.residual},
              {"contraction", s.contraction},
              {"hypotheses",
               {{"certified", s.hypotheses.certified},
                {"r", h.r},
                {"lambda_tilde", h.lambda_tilde},
                {"offset", h.offset},
                {"offset_bound", h.r / 2.0},
                {"L_inv_norm", h.L_inv_norm},
                {"lambda_hat", h.lambda_hat},
                {"lambda_c", h.lambda_c},
                {"lambda_c_times_L_inv_norm", h.lambda_c * h.L_inv_norm},
                {"closed_form_lambda_holds", h.closed_form_lambda_holds},
                {"background_error", h.background_error}}},
              {"attempts", attempts},
              {"log", log},
              {"domain_residual", r.domain.solver_residual},
              {"certified_error", r.domain.certified_error}};
}

Json to_json(const VerificationReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"bound", c.bound}, {"detail", c.detail}});
  Json certs = Json::array();
  for (const auto& c : r.certificates) certs.push_back(to_json(c));
  return Json{{"pass", r.pass()},
              {"failing", r.failing()},
              {"checks", checks},
              {"audit",
               {{"measured", vector_json(r.audit.measured)},
                {"error", vector_json(r.audit.error)},
                {"target", vector_json(r.audit.target)},
                {"relative", vector_json(r.audit.relative)},
                {"residual", r.audit.residual},
                {"relative_residual", r.audit.relative_residual},
                {"bound", r.audit.bound}}},
              {"certificates", certs},
              {"notes",
               "Negative-index moments are certified divergent numerically; the Hartogs extension step that "
               "rules out further holomorphic functions has no finite numerical witness."}};
}

std::string iterate_csv(const SolverReport& r) {
  std::ostringstream out;
  out.precision(17);
  const auto n = r.log.empty() ? 0 : r.log.front().tau.size();
  out << "iteration,residual,step";
  for (Eigen::Index k = 0; k < n; ++k) out << ",tau_" << k;
  out << "\n";
  for (const auto& it : r.log) {
    out << it.iteration << "," << it.residual << "," << it.step;
    for (Eigen::Index k = 0; k < n; ++k) out << "," << it.tau[k];
    out << "\n";
  }
  return out.str();
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace bergman
