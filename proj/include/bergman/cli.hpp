#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bergman/serialize.hpp"

namespace bergman {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitValidation = 2,
  kExitGiveUp = 3,
  kExitIo = 4,
};

// Everything a run depends on. Written next to the outputs so a run can be
// repeated with --config alone. The output directory is not part of it.
struct RunConfig {
  int m = 1;
  int n = 2;
  double c = 1e-2;  // first c tried
  double c_floor = 1e-8;
  double mu = 0.5;
  std::vector<double> mu_grid{0.2, 0.4, 0.6, 0.8};
  double beta = 0.0;  // 0 selects the default
  std::uint64_t seed = 1;
  double tol = 1e-12;  // solver tolerance relative to |cA|
  std::string growth = "centered";
  std::string format = "json";
  std::string decomposition;  // optional file to reuse
  std::size_t kernel_samples = 1000;
  std::size_t curvature_pairs = 20;
  std::size_t lift_samples = 10'000'000;
};

Json to_json(const RunConfig& config);
RunConfig run_config_from_json(const Json& j);

// Front end for the bergman-forge executable. Subcommands: construct,
// verify, sweep-mu, decompose. Returns an ExitCode.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace bergman
