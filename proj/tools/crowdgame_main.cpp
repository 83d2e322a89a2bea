// crowdgame CLI: validate worlds, simulate mechanisms, verify equilibria,
// run the paired-scenario impossibility demo, and sweep gold sizes or
// prejudice entropies. Exit codes: 0 success, 1 domain failure (failed
// constraint or negative verdict), 2 usage/parse error.

#include <CLI11.hpp>

#include <Eigen/Dense>

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "crowdgame/harness.hpp"

namespace {

std::optional<Eigen::VectorXd> parse_prob_list(const std::string& text) {
  std::string normalized = text;
  for (char& c : normalized) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(normalized);
  std::vector<double> values;
  double v = 0.0;
  while (in >> v) values.push_back(v);
  if (!in.eof() || values.empty()) return std::nullopt;
  Eigen::VectorXd result(static_cast<int>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) result[static_cast<int>(i)] = values[i];
  return result;
}

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<long long> trials;
  std::optional<std::string> out;
  int threads = 1;

  crowdgame::CommonOverrides overrides() const {
    crowdgame::CommonOverrides ov;
    ov.seed = seed;
    ov.trials = trials;
    ov.out = out;
    ov.threads = threads;
    return ov;
  }
};

void add_common(CLI::App* sub, CommonFlags& flags, bool config_required) {
  auto* config =
      sub->add_option("--config", flags.config, "experiment configuration file");
  if (config_required) config->required();
  sub->add_option("--seed", flags.seed, "master seed (overrides config)");
  sub->add_option("--trials", flags.trials, "trial count (overrides config)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--out", flags.out, "CSV output path (overrides config; default stdout)");
  sub->add_option("--threads", flags.threads, "worker threads (never changes results)")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crowd-labelling game simulator and mechanism analysis toolkit"};
  app.require_subcommand(1);

  CommonFlags validate_flags;
  auto* validate = app.add_subcommand("validate", "check the world constraints of a config");
  add_common(validate, validate_flags, true);

  CommonFlags simulate_flags;
  auto* simulate =
      app.add_subcommand("simulate", "estimate identification rates and the odds curve");
  add_common(simulate, simulate_flags, true);

  CommonFlags equilibrium_flags;
  auto* equilibrium = app.add_subcommand(
      "equilibrium", "test the configured profile for an epsilon-equilibrium");
  add_common(equilibrium, equilibrium_flags, true);

  CommonFlags impossibility_flags;
  std::optional<int> imp_k;
  std::string imp_base;
  std::optional<int> imp_agents;
  std::optional<int> imp_items;
  std::optional<std::string> imp_mechanism;
  std::optional<double> imp_threshold;
  auto* impossibility = app.add_subcommand(
      "impossibility", "paired scenarios with identical report laws (anchor-free mechanisms)");
  add_common(impossibility, impossibility_flags, false);
  impossibility->add_option("--k", imp_k, "label count")->check(CLI::Range(2, 1024));
  impossibility->add_option("--base", imp_base,
                            "base distribution, e.g. '0.5,0.5' (truth prior of scenario 1, "
                            "prejudice prior of scenario 2)");
  impossibility->add_option("--agents", imp_agents, "agent count")->check(CLI::PositiveNumber);
  impossibility->add_option("--items", imp_items, "items per game")->check(CLI::PositiveNumber);
  impossibility->add_option("--mechanism", imp_mechanism,
                            "agreement | pairwise_agreement");
  impossibility->add_option("--threshold", imp_threshold, "agreement score cut")
      ->check(CLI::Range(0.0, 1.0));

  CommonFlags gold_flags;
  std::string gold_list;
  auto* gold_sweep =
      app.add_subcommand("gold-sweep", "misclassification against the gold-set size");
  add_common(gold_sweep, gold_flags, true);
  gold_sweep->add_option("--gold", gold_list, "gold sizes to sweep, e.g. '1,2,5,10'")
      ->required();

  CommonFlags entropy_flags;
  std::vector<std::string> entropy_priors;
  std::optional<int> entropy_steps;
  std::optional<int> entropy_restarts;
  auto* entropy_sweep = app.add_subcommand(
      "entropy-sweep", "basin shares of best-response dynamics across prejudice entropies");
  add_common(entropy_sweep, entropy_flags, true);
  entropy_sweep->add_option("--p-u", entropy_priors,
                            "prejudice prior, e.g. '0.9,0.1' (repeatable; overrides config)");
  entropy_sweep->add_option("--steps", entropy_steps, "best-response sweeps per restart")
      ->check(CLI::NonNegativeNumber);
  entropy_sweep->add_option("--restarts", entropy_restarts, "random initial profiles")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (validate->parsed())
    return crowdgame::run_validate(validate_flags.config, std::cout, std::cerr);

  if (simulate->parsed())
    return crowdgame::run_simulate(simulate_flags.config, simulate_flags.overrides(),
                                   std::cout, std::cerr);

  if (equilibrium->parsed())
    return crowdgame::run_equilibrium(equilibrium_flags.config,
                                      equilibrium_flags.overrides(), std::cout, std::cerr);

  if (impossibility->parsed()) {
    crowdgame::ImpossibilityOptions options;
    options.config_path = impossibility_flags.config;
    options.k = imp_k;
    if (!imp_base.empty()) {
      const auto parsed = parse_prob_list(imp_base);
      if (!parsed) {
        std::cerr << "impossibility: cannot parse --base '" << imp_base << "'\n";
        return 2;
      }
      options.base_dist = *parsed;
    }
    options.agents = imp_agents;
    options.items = imp_items;
    options.mechanism = imp_mechanism;
    options.threshold = imp_threshold;
    return crowdgame::run_impossibility(options, impossibility_flags.overrides(), std::cout,
                                        std::cerr);
  }

  if (gold_sweep->parsed()) {
    crowdgame::GoldSweepOptions options;
    std::string normalized = gold_list;
    for (char& c : normalized) {
      if (c == ',') c = ' ';
    }
    std::istringstream in(normalized);
    int g = 0;
    while (in >> g) options.gold_grid.push_back(g);
    if (!in.eof() || options.gold_grid.empty()) {
      std::cerr << "gold-sweep: cannot parse --gold '" << gold_list << "'\n";
      return 2;
    }
    return crowdgame::run_gold_sweep(gold_flags.config, options, gold_flags.overrides(),
                                     std::cout, std::cerr);
  }

  if (entropy_sweep->parsed()) {
    crowdgame::EntropySweepOptions options;
    for (const auto& text : entropy_priors) {
      const auto parsed = parse_prob_list(text);
      if (!parsed) {
        std::cerr << "entropy-sweep: cannot parse --p-u '" << text << "'\n";
        return 2;
      }
      options.prejudice_priors.push_back(*parsed);
    }
    options.dynamics_steps = entropy_steps;
    options.restarts = entropy_restarts;
    return crowdgame::run_entropy_sweep(entropy_flags.config, options,
                                        entropy_flags.overrides(), std::cout, std::cerr);
  }

  return 2;
}
