// Subcommand drivers behind the CLI. Each returns a process exit status:
// 0 success, 1 domain failure (failed constraint or negative verdict),
// 2 usage or parse error. Diagnostics go to `err`; CSV goes to the resolved
// output (file when set, otherwise `out`).

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace crowdgame {

struct CommonOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<long long> trials;
  std::optional<std::string> out;
  int threads = 1;
};

int run_validate(const std::string& config_path, std::ostream& out, std::ostream& err);

int run_simulate(const std::string& config_path, const CommonOverrides& overrides,
                 std::ostream& out, std::ostream& err);

int run_equilibrium(const std::string& config_path, const CommonOverrides& overrides,
                    std::ostream& out, std::ostream& err);

struct ImpossibilityOptions {
  std::string config_path;  // optional: supplies defaults below
  std::optional<int> k;
  std::optional<Eigen::VectorXd> base_dist;
  std::optional<int> agents;
  std::optional<int> items;
  std::optional<std::string> mechanism;  // agreement | pairwise_agreement
  std::optional<double> threshold;
};

int run_impossibility(const ImpossibilityOptions& options, const CommonOverrides& overrides,
                      std::ostream& out, std::ostream& err);

struct GoldSweepOptions {
  std::vector<int> gold_grid;  // values of g to sweep
};

int run_gold_sweep(const std::string& config_path, const GoldSweepOptions& options,
                   const CommonOverrides& overrides, std::ostream& out, std::ostream& err);

struct EntropySweepOptions {
  // Overrides the [sweep] prior list when non-empty.
  std::vector<Eigen::VectorXd> prejudice_priors;
  std::optional<int> dynamics_steps;
  std::optional<int> restarts;
};

int run_entropy_sweep(const std::string& config_path, const EntropySweepOptions& options,
                      const CommonOverrides& overrides, std::ostream& out,
                      std::ostream& err);

}  // namespace crowdgame
