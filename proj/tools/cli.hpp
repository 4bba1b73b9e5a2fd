#pragma once

// spdgeo command line: sample, fit, bench, gmean, check.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace spdgeo::cli {

enum ExitCode { kOk = 0, kViolations = 1, kUsage = 2, kData = 3, kNoConvergence = 4 };

/// Every flag of every command. Unset optionals fall back to per-command
/// defaults.
struct RunConfig {
  std::string command;
  std::uint64_t seed = 0;
  std::string out;
  int threads = 0;  // 0: hardware concurrency
  std::optional<double> tol;
  std::optional<int> max_iter;

  // dgf
  std::string dgf = "kotz";
  std::optional<double> alpha, beta, b, nu;

  // sample
  std::int64_t n = 10000;
  int dim = 0;
  std::string scatter;

  // fit
  std::string data;
  std::string method = "auto";

  // bench
  std::vector<int> dims;
  std::vector<double> betas;
  std::optional<double> alpha_ratio;
  std::vector<std::string> methods{"fp", "fp2", "sd", "cg", "lbfgs"};

  // gmean
  std::vector<std::string> matrices;
  std::vector<double> weights;
  std::string objective = "mean";

  // check
  std::string suite = "all";
  int trials = 1000;
  std::optional<double> fault_mean_scale;

  bool operator==(const RunConfig&) const = default;
};

std::string to_json(const RunConfig& cfg);
RunConfig config_from_json(const std::string& text);

/// Runs one command line; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spdgeo::cli
