#include "bergman/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

#include "bergman/errors.hpp"

namespace bergman {

namespace fs = std::filesystem;

Json to_json(const RunConfig& c) {
  return Json{{"m", c.m},
              {"n", c.n},
              {"c", c.c},
              {"c_floor", c.c_floor},
              {"mu", c.mu},
              {"mu_grid", c.mu_grid},
              {"beta", c.beta},
              {"seed", c.seed},
              {"tol", c.tol},
              {"growth", c.growth},
              {"format", c.format},
              {"decomposition", c.decomposition},
              {"kernel_samples", c.kernel_samples},
              {"curvature_pairs", c.curvature_pairs},
              {"lift_samples", c.lift_samples}};
}

RunConfig run_config_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("run config must be a JSON object");
  RunConfig c;
  // absent keys keep their defaults
  auto take = [&](const char* key, auto& field) {
    if (!j.contains(key)) return;
    try {
      j.at(key).get_to(field);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("config field '") + key + "': " + e.what());
    }
  };
  take("m", c.m);
  take("n", c.n);
  take("c", c.c);
  take("c_floor", c.c_floor);
  take("mu", c.mu);
  take("mu_grid", c.mu_grid);
  take("beta", c.beta);
  take("seed", c.seed);
  take("tol", c.tol);
  take("growth", c.growth);
  take("format", c.format);
  take("decomposition", c.decomposition);
  take("kernel_samples", c.kernel_samples);
  take("curvature_pairs", c.curvature_pairs);
  take("lift_samples", c.lift_samples);
  return c;
}

namespace {

// Routes flags into a RunConfig so that explicit flags override a --config file.
class FlagSet {
 public:
  template <class T>
  void add(CLI::App* app, const std::string& name, T RunConfig::*field, const std::string& help) {
    auto* opt = app->add_option(name, flags_.*field, help);
    links_.push_back({opt, [field](RunConfig& dst, const RunConfig& src) { dst.*field = src.*field; }});
  }

  RunConfig resolve(const std::string& config_path) const {
    RunConfig out = config_path.empty() ? RunConfig{} : run_config_from_json(read_json_file(config_path));
    for (const auto& [opt, copy] : links_)
      if (opt->count() > 0) copy(out, flags_);
    return out;
  }

 private:
  RunConfig flags_;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&, const RunConfig&)>>> links_;
};

void add_run_flags(CLI::App* app, FlagSet& flags) {
  flags.add(app, "--m", &RunConfig::m, "kernel exponent m >= 1");
  flags.add(app, "--n", &RunConfig::n, "complex dimension n >= 2");
  flags.add(app, "--c", &RunConfig::c, "first scale c tried, halved until the hypotheses hold");
  flags.add(app, "--c-floor", &RunConfig::c_floor, "give up below this c");
  flags.add(app, "--mu", &RunConfig::mu, "shell parameter in (0,1)");
  flags.add(app, "--beta", &RunConfig::beta, "cross-section exponent, 0 for the default");
  flags.add(app, "--seed", &RunConfig::seed, "random seed");
  flags.add(app, "--tol", &RunConfig::tol, "solver tolerance relative to |cA|");
  flags.add(app, "--growth", &RunConfig::growth, "box growth: centered or one_sided");
  flags.add(app, "--decomposition", &RunConfig::decomposition, "reuse a decomposition file");
}

ConstructConfig construct_config(const RunConfig& rc) {
  ConstructConfig cc;
  cc.m = rc.m;
  cc.n = rc.n;
  cc.c_initial = rc.c;
  cc.c_floor = rc.c_floor;
  cc.mu = rc.mu;
  cc.beta = rc.beta;
  cc.seed = rc.seed;
  cc.tol_rel = rc.tol;
  cc.growth = parse_growth(rc.growth);
  if (!rc.decomposition.empty()) cc.decomposition = decomposition_from_json(read_json_file(rc.decomposition));
  validate_config(cc);
  return cc;
}

void check_format(const RunConfig& rc) {
  if (rc.format != "json" && rc.format != "csv") throw ValidationError("format must be json or csv");
}

std::string run_config_text(const RunConfig& rc, const std::string& command) {
  Json j{{"command", command}};
  j.update(to_json(rc));
  return dump(j);
}

std::string box_csv(const ConstructedDomain& d) {
  std::ostringstream out;
  out.precision(17);
  out << "piece,role";
  for (int k = 0; k < d.params.n; ++k) out << ",lower_" << k;
  for (int k = 0; k < d.params.n; ++k) out << ",upper_" << k;
  out << "\n";
  auto row = [&](std::size_t i, const char* role, const AxisBox& b) {
    out << i << "," << role;
    for (const auto& x : b.lower) out << "," << to_double(x);
    for (const auto& x : b.upper) out << "," << to_double(x);
    out << "\n";
  };
  for (std::size_t i = 0; i < d.boxes.size(); ++i) row(i, "solved", d.boxes[i]);
  for (std::size_t i = 0; i < d.background.anchors.size(); ++i) row(i, "anchor", d.background.anchors[i]);
  std::size_t k = 0;
  for (const auto& g : d.background.skeleton)
    for (const auto& s : g.segments) row(k++, "skeleton", s);
  return out.str();
}

int cmd_construct(const RunConfig& rc, const fs::path& out_dir, std::ostream& out) {
  check_format(rc);
  const auto cc = construct_config(rc);
  const auto result = construct_domain(cc);
  write_text_file(out_dir / "geometry.json", dump(to_json(result.domain)));
  write_text_file(out_dir / "solver_report.json", dump(to_json(result)));
  write_text_file(out_dir / "iterates.csv", iterate_csv(result.report));
  write_text_file(out_dir / "run_config.json", run_config_text(rc, "construct"));
  if (rc.format == "csv") write_text_file(out_dir / "boxes.csv", box_csv(result.domain));
  out << "constructed (m, n) = (" << rc.m << ", " << rc.n << ") at c = " << result.accepted_c << " after "
      << result.report.iterations << " iterations, residual " << result.report.residual << "\n";
  return kExitOk;
}

std::string kernel_csv(const ConstructedDomain& d, const MomentVector& measured, const RunConfig& rc) {
  const KernelModel model(d.params.m, d.params.n, d.params.c, measured);
  std::ostringstream out;
  out.precision(17);
  for (int k = 0; k < d.params.n; ++k) out << "z" << k << "_re,z" << k << "_im,";
  out << "K_measured,K_target\n";
  for (const auto& z : lifted_samples(d, rc.kernel_samples, rc.seed)) {
    for (const auto& zk : z) out << zk.real() << "," << zk.imag() << ",";
    out << model.series(z) << "," << model.closed_form(z) << "\n";
  }
  return out.str();
}

Json failed_report(const std::string& check, const std::string& detail) {
  Json checks = Json::array();
  checks.push_back({{"name", check}, {"pass", false}, {"detail", detail}});
  return Json{{"pass", false}, {"failing", check}, {"checks", checks}};
}

int cmd_verify(const fs::path& file, const RunConfig& rc, const fs::path& out_dir, std::ostream& out) {
  check_format(rc);
  const auto report_path = out_dir / "verification.json";
  ConstructedDomain domain;
  try {
    domain = domain_from_json(read_json_file(file));
  } catch (const ParseError& e) {
    write_text_file(report_path, dump(failed_report("geometry parse", e.what())));
    throw;
  } catch (const IoError& e) {
    write_text_file(report_path, dump(failed_report("geometry parse", e.what())));
    throw;
  } catch (const ValidationError& e) {
    // well-formed but inconsistent geometry is a failed check, not bad input
    write_text_file(report_path, dump(failed_report("geometry validation", e.what())));
    out << "FAIL geometry validation: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  try {
    for (const auto& p : domain.primitives()) validate(p, domain.params.m);
  } catch (const ValidationError& e) {
    write_text_file(report_path, dump(failed_report("geometry validation", e.what())));
    out << "FAIL geometry validation: " << e.what() << "\n";
    return kExitCheckFailed;
  }

  VerificationOptions opts;
  opts.seed = rc.seed;
  opts.kernel_samples = rc.kernel_samples;
  opts.curvature_pairs = rc.curvature_pairs;
  opts.lift_samples = rc.lift_samples;
  opts.tol_rel = rc.tol;
  const auto report = verify_domain(domain, opts);
  write_text_file(report_path, dump(to_json(report)));
  if (rc.format == "csv" && report.audit.measured.minCoeff() > 0.0)
    write_text_file(out_dir / "kernel_samples.csv", kernel_csv(domain, report.audit.measured, rc));
  for (const auto& c : report.checks) out << (c.pass ? "pass " : "FAIL ") << c.name << ": " << c.value << "\n";
  return report.pass() ? kExitOk : kExitCheckFailed;
}

int cmd_sweep_mu(RunConfig rc, const fs::path& out_dir, std::ostream& out) {
  check_format(rc);
  auto grid = rc.mu_grid;
  if (grid.empty()) throw ValidationError("mu grid is empty");
  std::sort(grid.begin(), grid.end());
  if (std::adjacent_find(grid.begin(), grid.end()) != grid.end()) throw ValidationError("mu grid has repeated values");
  for (double mu : grid)
    if (!(mu > 0.0 && mu < 1.0)) throw ValidationError("mu grid must lie in (0,1)");

  // c is fixed by the smallest mu, and every member shares its decomposition
  rc.mu = grid.front();
  auto cc = construct_config(rc);
  std::vector<ConstructResult> runs;
  runs.push_back(construct_domain(cc));
  cc.c_initial = cc.c_floor = runs.front().accepted_c;
  cc.decomposition = runs.front().domain.decomposition;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    cc.mu = grid[k];
    runs.push_back(construct_domain(cc));
  }

  bool pass = true;
  Json rows = Json::array();
  std::ostringstream csv;
  csv.precision(17);
  csv << "mu,c,inf_S,inf_norm_sq,target,relative_error,increasing,pass\n";
  std::vector<const ConstructedDomain*> domains;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto& d = runs[k].domain;
    domains.push_back(&d);
    const auto fam = family_invariant(d);
    const bool increasing = k == 0 || family_invariant(runs[k - 1].domain).inf_S < fam.inf_S;
    pass = pass && fam.pass && increasing;
    const double inf_s = to_double(fam.inf_S);
    // on the lift |z|^2 = S(log|z|), so both infima agree
    csv << grid[k] << "," << d.c() << "," << inf_s << "," << inf_s << "," << to_double(fam.target) << ","
        << fam.relative_error << "," << increasing << "," << fam.pass << "\n";
    rows.push_back({{"mu", grid[k]}, {"c", d.c()}, {"inf_S", to_json(fam.inf_S)}, {"target", to_json(fam.target)},
                    {"relative_error", fam.relative_error}, {"increasing", increasing}, {"pass", fam.pass}});
    const auto dir = out_dir / ("mu_" + std::to_string(k));
    fs::create_directories(dir);
    write_text_file(dir / "geometry.json", dump(to_json(d)));
  }

  Json tail{{"found", false}};
  if (const auto w = tail_intersection_witness(domains)) {
    bool inside = true;
    for (const auto* d : domains) inside = inside && contains(Primitive(d->background.tail), *w);
    tail = {{"found", true}, {"point", to_json(*w)}, {"inside_every_tail", inside}};
    pass = pass && inside;
  } else {
    pass = false;
  }

  Json pairs = Json::array();
  for (std::size_t i = 0; i < runs.size(); ++i)
    for (std::size_t j = i + 1; j < runs.size(); ++j) {
      const auto w = symmetric_difference_witness(runs[i].domain, runs[j].domain);
      Json entry{{"mu_inside", grid[i]}, {"mu_outside", grid[j]}, {"found", w.has_value()}};
      if (w) entry["box"] = to_json(Primitive(*w));
      pairs.push_back(std::move(entry));
      pass = pass && w.has_value();
    }

  const Json report{{"pass", pass}, {"c", runs.front().accepted_c}, {"rows", rows},
                    {"tail_intersection_witness", tail}, {"symmetric_difference_witnesses", pairs}};
  write_text_file(out_dir / "sweep.csv", csv.str());
  write_text_file(out_dir / "sweep.json", dump(report));
  write_text_file(out_dir / "run_config.json", run_config_text(rc, "sweep-mu"));
  out << csv.str();
  return pass ? kExitOk : kExitCheckFailed;
}

int cmd_decompose(const RunConfig& rc, const fs::path& out_dir, std::ostream& out) {
  const auto cc = construct_config(rc);
  const auto dec = cc.decomposition ? *cc.decomposition : fit_decomposition(cc);
  const IndexSet idx(rc.m, rc.n);
  const auto rep = verify_decomposition(dec, target_moment_vector(idx));
  auto j = to_json(dec);
  j["report"] = {{"pass", rep.pass},
                 {"residual", rep.residual},
                 {"min_weight", rep.min_weight},
                 {"condition", rep.condition},
                 {"L_inv_norm", rep.L_inv_norm},
                 {"inverse_error", rep.inverse_error},
                 {"rank", rep.rank},
                 {"failures", rep.failures}};
  write_text_file(out_dir / "decomposition.json", dump(j));
  write_text_file(out_dir / "run_config.json", run_config_text(rc, "decompose"));
  out << dec.size() << " points, relative residual " << rep.residual << ", cond(L) " << rep.condition << "\n";
  return rep.pass ? kExitOk : kExitCheckFailed;
}

int report_error(const fs::path& out_dir, int code, const std::string& category, const std::string& message,
                 const std::string& hypothesis, std::ostream& err) {
  err << "bergman-forge: " << category << ": " << message << "\n";
  Json j{{"exit_code", code}, {"category", category}, {"message", message}};
  if (!hypothesis.empty()) j["failing_hypothesis"] = hypothesis;
  try {
    fs::create_directories(out_dir);
    write_text_file(out_dir / "error.json", dump(j));
  } catch (const std::exception&) {
    // the exit status still carries the outcome
  }
  return code;
}

// Maps exceptions to the exit-code contract. `fallback` covers the remaining
// library errors, which mean the command itself failed.
int guarded(const fs::path& out_dir, int fallback, std::ostream& err, const std::function<int()>& body) {
  try {
    fs::create_directories(out_dir);
    return body();
  } catch (const ValidationError& e) {
    return report_error(out_dir, kExitValidation, "validation", e.what(), "", err);
  } catch (const GiveUp& e) {
    return report_error(out_dir, kExitGiveUp, "give-up", e.what(), e.failing_hypothesis, err);
  } catch (const ParseError& e) {
    return report_error(out_dir, kExitIo, "parse", e.what(), "", err);
  } catch (const IoError& e) {
    return report_error(out_dir, kExitIo, "io", e.what(), "", err);
  } catch (const fs::filesystem_error& e) {
    return report_error(out_dir, kExitIo, "io", e.what(), "", err);
  } catch (const Error& e) {
    return report_error(out_dir, fallback, "failure", e.what(), "", err);
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Constructs and verifies Reinhardt domains with a prescribed polynomial Bergman kernel"};
  app.require_subcommand(1);

  std::string out_dir = ".";
  std::string config_path;

  auto* construct = app.add_subcommand("construct", "solve for a domain and write geometry.json");
  FlagSet construct_flags;
  add_run_flags(construct, construct_flags);
  construct_flags.add(construct, "--format", &RunConfig::format, "json, or csv to add boxes.csv");

  auto* verify = app.add_subcommand("verify", "check a geometry file and write verification.json");
  std::string geometry;
  verify->add_option("file", geometry, "geometry.json from construct")->required();
  FlagSet verify_flags;
  verify_flags.add(verify, "--seed", &RunConfig::seed, "random seed for sampled checks");
  verify_flags.add(verify, "--tol", &RunConfig::tol, "solver tolerance the domain was built with");
  verify_flags.add(verify, "--kernel-samples", &RunConfig::kernel_samples, "lifted kernel sample points");
  verify_flags.add(verify, "--curvature-pairs", &RunConfig::curvature_pairs, "point/direction pairs");
  verify_flags.add(verify, "--lift-samples", &RunConfig::lift_samples, "Monte Carlo samples per lift box");
  verify_flags.add(verify, "--format", &RunConfig::format, "json, or csv to add kernel_samples.csv");

  auto* sweep = app.add_subcommand("sweep-mu", "construct one domain per mu at a common c");
  FlagSet sweep_flags;
  add_run_flags(sweep, sweep_flags);
  sweep_flags.add(sweep, "--mu-grid", &RunConfig::mu_grid, "mu values in (0,1)");
  sweep_flags.add(sweep, "--format", &RunConfig::format, "json or csv");

  auto* decompose = app.add_subcommand("decompose", "fit a cone decomposition and write decomposition.json");
  FlagSet decompose_flags;
  add_run_flags(decompose, decompose_flags);

  for (auto* sub : {construct, verify, sweep, decompose}) {
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--config", config_path, "run_config.json to start from; flags override it");
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return report_error(out_dir, kExitValidation, "usage", e.what(), "", err);
  }

  const fs::path dir(out_dir);
  if (construct->parsed())
    return guarded(dir, kExitGiveUp, err,
                   [&] { return cmd_construct(construct_flags.resolve(config_path), dir, out); });
  if (verify->parsed())
    return guarded(dir, kExitCheckFailed, err,
                   [&] { return cmd_verify(geometry, verify_flags.resolve(config_path), dir, out); });
  if (sweep->parsed())
    return guarded(dir, kExitGiveUp, err, [&] { return cmd_sweep_mu(sweep_flags.resolve(config_path), dir, out); });
  return guarded(dir, kExitGiveUp, err,
                 [&] { return cmd_decompose(decompose_flags.resolve(config_path), dir, out); });
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace bergman
