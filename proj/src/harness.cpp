#include "crowdgame/harness.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>

#include "crowdgame/config.hpp"
#include "crowdgame/csv.hpp"
#include "crowdgame/equilibrium.hpp"
#include "crowdgame/parallel.hpp"
#include "crowdgame/stats.hpp"

namespace crowdgame {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

std::optional<ExperimentConfig> load_config(const std::string& path, std::ostream& err,
                                            int& status) {
  try {
    return parse_config_file(path);
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    status = kExitUsage;
    return std::nullopt;
  }
}

void apply_overrides(ExperimentConfig& cfg, const CommonOverrides& overrides) {
  if (overrides.seed) cfg.seed = *overrides.seed;
  if (overrides.trials) cfg.trials = *overrides.trials;
  if (overrides.out) cfg.out = *overrides.out;
}

int with_csv_output(const std::string& path, std::ostream& fallback, std::ostream& err,
                    const std::function<int(std::ostream&)>& body) {
  if (path.empty()) return body(fallback);
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    err << "cannot open output file '" << path << "'\n";
    return kExitUsage;
  }
  return body(file);
}

std::string deviation_label(const DeviationReport& d) {
  return to_string(d.from) + "->" + to_string(d.to);
}

}  // namespace

int run_validate(const std::string& config_path, std::ostream& out, std::ostream& err) {
  int status = kExitOk;
  const auto cfg = load_config(config_path, err, status);
  if (!cfg) return status;

  WorldDistribution world = build_world(*cfg);
  const ValidationReport report = validate_world(world);
  out << "world validation (k = " << cfg->k << ")\n";
  for (const auto& check : report.checks) {
    out << "  [" << (check.passed ? "PASS" : "FAIL") << "] " << check.id << ": "
        << check.detail << "\n";
  }
  out << "result: " << (report.all_passed() ? "PASS" : "FAIL") << "\n";
  return report.all_passed() ? kExitOk : kExitDomain;
}

int run_simulate(const std::string& config_path, const CommonOverrides& overrides,
                 std::ostream& out, std::ostream& err) {
  int status = kExitOk;
  auto cfg = load_config(config_path, err, status);
  if (!cfg) return status;
  apply_overrides(*cfg, overrides);

  try {
    rng::Stream master(cfg->seed);
    rng::Stream assignment_stream = master.fork(rng::Lane::World);
    const GameConfig game_cfg = build_game_config(*cfg, assignment_stream);
    const StrategyProfile profile = build_profile(*cfg, game_cfg.roster);
    const MechanismHandle mechanism = build_mechanism(*cfg);

    EvalOptions options;
    options.items_grid = cfg->items_grid.empty() ? std::vector<int>{cfg->n_items}
                                                 : cfg->items_grid;
    options.threads = overrides.threads;
    const ExperimentConfig& cfg_ref = *cfg;
    options.assignment_for = [&cfg_ref](int n_items, rng::Stream& stream) {
      return build_assignment(cfg_ref, n_items, stream);
    };

    const MechanismMetrics metrics =
        evaluate_mechanism(mechanism, game_cfg, profile, static_cast<int>(cfg->trials),
                           master.fork(rng::Lane::Mechanism), options);

    return with_csv_output(cfg->out, out, err, [&](std::ostream& os) {
      CsvWriter csv(os, {"n_items", "p_ii_hat", "p_uu_hat", "odds_ratio_ii",
                         "odds_ratio_uu", "trials", "seed"});
      for (const auto& point : metrics.odds_ratio_curve) {
        csv.row({static_cast<long long>(point.n_items), cell(point.p_ii), cell(point.p_uu),
                 cell(point.odds_ii), cell(point.odds_uu), cfg->trials, cfg->seed});
      }
      return kExitOk;
    });
  } catch (const std::invalid_argument& e) {
    err << "simulate: " << e.what() << "\n";
    return kExitUsage;
  }
}

int run_equilibrium(const std::string& config_path, const CommonOverrides& overrides,
                    std::ostream& out, std::ostream& err) {
  int status = kExitOk;
  auto cfg = load_config(config_path, err, status);
  if (!cfg) return status;
  apply_overrides(*cfg, overrides);

  try {
    rng::Stream master(cfg->seed);
    rng::Stream assignment_stream = master.fork(rng::Lane::World);
    const GameConfig game_cfg = build_game_config(*cfg, assignment_stream);
    const StrategyProfile profile = build_profile(*cfg, game_cfg.roster);
    const MechanismHandle mechanism = build_mechanism(*cfg);

    const EquilibriumVerdict verdict = verify_equilibrium(
        game_cfg, profile, mechanism, cfg->epsilon, static_cast<int>(cfg->trials),
        master.fork(rng::Lane::Mechanism), overrides.threads);

    const int code = with_csv_output(cfg->out, out, err, [&](std::ostream& os) {
      CsvWriter csv(os, {"agent_type", "deviation", "baseline", "deviated", "gain",
                         "std_err", "verdict"});
      for (const auto& d : verdict.deviations) {
        const bool within = d.gain <= verdict.epsilon + 2.0 * d.combined_std_err;
        csv.row({d.agent_type, deviation_label(d), d.baseline.value, d.deviated.value,
                 d.gain, d.combined_std_err, std::string(within ? "true" : "false")});
      }
      return kExitOk;
    });
    if (code != kExitOk) return code;
    err << "epsilon-equilibrium (epsilon = " << format_double(verdict.epsilon)
        << "): " << (verdict.is_epsilon_equilibrium ? "yes" : "no") << "\n";
    return verdict.is_epsilon_equilibrium ? kExitOk : kExitDomain;
  } catch (const std::invalid_argument& e) {
    err << "equilibrium: " << e.what() << "\n";
    return kExitUsage;
  }
}

int run_impossibility(const ImpossibilityOptions& options, const CommonOverrides& overrides,
                      std::ostream& out, std::ostream& err) {
  int k = 2;
  Eigen::VectorXd base = Eigen::VectorXd::Constant(2, 0.5);
  int agents = 6;
  int items = 30;
  std::string mechanism_name = "agreement";
  double threshold = 0.8;
  long long trials = 1000;
  std::uint64_t seed = 1;
  std::string out_path;

  if (!options.config_path.empty()) {
    int status = kExitOk;
    const auto cfg = load_config(options.config_path, err, status);
    if (!cfg) return status;
    k = cfg->k;
    base = cfg->truth_prior;
    agents = cfg->n_agents;
    items = cfg->n_items;
    mechanism_name = cfg->mechanism;
    threshold = cfg->threshold;
    trials = cfg->trials;
    seed = cfg->seed;
    out_path = cfg->out;
  }
  if (options.k) k = *options.k;
  if (options.base_dist) base = *options.base_dist;
  if (options.agents) agents = *options.agents;
  if (options.items) items = *options.items;
  if (options.mechanism) mechanism_name = *options.mechanism;
  if (options.threshold) threshold = *options.threshold;
  if (overrides.trials) trials = *overrides.trials;
  if (overrides.seed) seed = *overrides.seed;
  if (overrides.out) out_path = *overrides.out;

  if (mechanism_name != "agreement" && mechanism_name != "pairwise_agreement") {
    err << "impossibility: the paired-scenario demo is defined for mechanisms that see "
           "only reports; '"
        << mechanism_name << "' requires anchor data\n";
    return kExitDomain;
  }
  if (base.size() != k) {
    err << "impossibility: base distribution needs " << k << " entries\n";
    return kExitUsage;
  }

  try {
    const Distribution base_dist{base};
    const MechanismHandle handle = mechanism_name == "agreement"
                                       ? make_agreement_handle(threshold)
                                       : make_pairwise_agreement_handle(threshold);
    const ImpossibilityReport report =
        impossibility_demo(k, base_dist, agents, items, handle, static_cast<int>(trials),
                           rng::Stream(seed).fork(rng::Lane::Mechanism), overrides.threads);

    return with_csv_output(out_path, out, err, [&](std::ostream& os) {
      CsvWriter csv(os, {"success_rate_scenario1", "success_rate_scenario2", "combined",
                         "pooled_std_err", "chi_square_pvalue", "trials", "seed"});
      const double pooled = std::sqrt(report.std_err_scenario1 * report.std_err_scenario1 +
                                      report.std_err_scenario2 * report.std_err_scenario2);
      csv.row({report.success_rate_scenario1, report.success_rate_scenario2,
               report.combined, pooled, report.distribution_test_pvalue,
               static_cast<long long>(report.trials), seed});
      return kExitOk;
    });
  } catch (const std::invalid_argument& e) {
    err << "impossibility: " << e.what() << "\n";
    return kExitUsage;
  }
}

int run_gold_sweep(const std::string& config_path, const GoldSweepOptions& options,
                   const CommonOverrides& overrides, std::ostream& out, std::ostream& err) {
  int status = kExitOk;
  auto cfg = load_config(config_path, err, status);
  if (!cfg) return status;
  apply_overrides(*cfg, overrides);

  if (cfg->mechanism != "gold_seeded") {
    err << "gold-sweep: config must select the gold_seeded mechanism, got '"
        << cfg->mechanism << "'\n";
    return kExitUsage;
  }
  if (options.gold_grid.empty()) {
    err << "gold-sweep: no gold sizes given (use --gold G1,G2,...)\n";
    return kExitUsage;
  }
  for (int g : options.gold_grid) {
    if (g < 1 || g > cfg->n_items) {
      err << "gold-sweep: gold size " << g << " outside [1, n_items]\n";
      return kExitUsage;
    }
  }

  try {
    rng::Stream master(cfg->seed);
    rng::Stream assignment_stream = master.fork(rng::Lane::World);
    const GameConfig game_cfg = build_game_config(*cfg, assignment_stream);
    const StrategyProfile profile = build_profile(*cfg, game_cfg.roster);
    const int n_agents = game_cfg.roster.agent_count();
    const int trials = static_cast<int>(cfg->trials);

    std::vector<char> target(n_agents, 0);
    for (int a : truthful_informed_set(game_cfg.roster, profile)) target[a] = 1;

    return with_csv_output(cfg->out, out, err, [&](std::ostream& os) {
      CsvWriter csv(os, {"g", "misclassification_rate", "mean_rounds", "trials", "seed"});
      for (std::size_t gi = 0; gi < options.gold_grid.size(); ++gi) {
        const int g = options.gold_grid[gi];
        const MechanismHandle handle =
            make_gold_seeded_handle(g, cfg->accuracy_cut, cfg->agree_cut, cfg->max_rounds);
        rng::Stream sweep_stream = master.fork(rng::Lane::Mechanism).fork(gi);

        std::vector<long long> mistakes(trials, 0);
        std::vector<int> rounds(trials, 0);
        parallel_for(trials, overrides.threads, [&](int t) {
          rng::Stream trial_stream = sweep_stream.fork(static_cast<std::uint64_t>(t));
          const ReportMatrix rm = generate_reports(game_cfg, profile, trial_stream);
          const MechanismOutcome outcome = run_mechanism(handle, rm, game_cfg.assignment);
          long long wrong = 0;
          for (int a = 0; a < n_agents; ++a) {
            const bool identified = outcome.contains(a);
            if (identified != static_cast<bool>(target[a])) ++wrong;
          }
          mistakes[t] = wrong;
          rounds[t] = outcome.rounds;
        });

        long long total_wrong = 0;
        long long total_rounds = 0;
        for (int t = 0; t < trials; ++t) {
          total_wrong += mistakes[t];
          total_rounds += rounds[t];
        }
        csv.row({static_cast<long long>(g),
                 static_cast<double>(total_wrong) / (static_cast<double>(trials) * n_agents),
                 static_cast<double>(total_rounds) / trials, cfg->trials, cfg->seed});
      }
      return kExitOk;
    });
  } catch (const std::invalid_argument& e) {
    err << "gold-sweep: " << e.what() << "\n";
    return kExitUsage;
  }
}

int run_entropy_sweep(const std::string& config_path, const EntropySweepOptions& options,
                      const CommonOverrides& overrides, std::ostream& out,
                      std::ostream& err) {
  int status = kExitOk;
  auto cfg = load_config(config_path, err, status);
  if (!cfg) return status;
  apply_overrides(*cfg, overrides);

  std::vector<Eigen::VectorXd> priors =
      options.prejudice_priors.empty() ? cfg->sweep_prejudice_priors
                                       : options.prejudice_priors;
  if (priors.empty()) {
    err << "entropy-sweep: no prejudice priors given (config [sweep] prior lines or "
           "--p-u flags)\n";
    return kExitUsage;
  }
  const int steps = options.dynamics_steps.value_or(cfg->dynamics_steps);
  const int restarts = options.restarts.value_or(cfg->restarts);

  try {
    rng::Stream master(cfg->seed);
    rng::Stream assignment_stream = master.fork(rng::Lane::World);
    const Assignment assignment = build_assignment(*cfg, cfg->n_items, assignment_stream);
    const AgentRoster roster = build_roster(*cfg);
    const MechanismHandle mechanism = build_mechanism(*cfg);

    // Every swept prior must leave the world constraints satisfied.
    for (const auto& prior : priors) {
      if (prior.size() != cfg->k) {
        err << "entropy-sweep: a swept prior has " << prior.size() << " entries, needs "
            << cfg->k << "\n";
        return kExitUsage;
      }
      const WorldDistribution world(LabelSpace(cfg->k), Distribution(cfg->truth_prior),
                                    Distribution(prior), ConditionalTable(cfg->signal_rows));
      const ValidationReport report = validate_world(world);
      if (!report.all_passed()) {
        err << "entropy-sweep: swept prior violates the world constraints:\n";
        for (const auto& check : report.checks) {
          if (!check.passed) err << "  " << check.id << ": " << check.detail << "\n";
        }
        return kExitDomain;
      }
    }

    DynamicsOptions dynamics;
    dynamics.max_sweeps = steps;
    dynamics.trials = cfg->dynamics_trials;
    dynamics.switch_margin = cfg->switch_margin;
    dynamics.threads = 1;  // parallelism lives across restarts

    return with_csv_output(cfg->out, out, err, [&](std::ostream& os) {
      CsvWriter csv(os, {"entropy_pu", "entropy_informed_reports", "basin_prejudice",
                         "basin_truthful", "basin_randomise", "basin_other",
                         "nonconverged", "restarts", "seed"});
      for (std::size_t pi = 0; pi < priors.size(); ++pi) {
        const Distribution prejudice_prior{priors[pi]};
        const WorldDistribution world(LabelSpace(cfg->k), Distribution(cfg->truth_prior),
                                      prejudice_prior, ConditionalTable(cfg->signal_rows));
        const GameConfig game_cfg(world, roster, assignment, cfg->prejudice_mode);

        // Marginal law of an informed truthful report.
        const Distribution report_law{
            (cfg->truth_prior.transpose() * cfg->signal_rows).transpose()};

        rng::Stream prior_stream = master.fork(rng::Lane::Dynamics).fork(pi);
        std::vector<int> classes(restarts, -1);
        std::vector<char> converged(restarts, 0);
        parallel_for(restarts, overrides.threads, [&](int r) {
          rng::Stream restart_stream = prior_stream.fork(static_cast<std::uint64_t>(r));
          rng::Stream init_stream = restart_stream.fork(rng::Lane::Strategies);
          const StrategyProfile initial = random_profile(roster, init_stream);
          const DynamicsResult result = best_response_dynamics(
              game_cfg, initial, mechanism, dynamics, restart_stream.fork(rng::Lane::Dynamics));
          converged[r] = result.converged ? 1 : 0;
          classes[r] = static_cast<int>(classify_profile(roster, result.profile));
        });

        int counts[4] = {0, 0, 0, 0};
        int nonconverged = 0;
        for (int r = 0; r < restarts; ++r) {
          if (!converged[r]) {
            ++nonconverged;
            continue;
          }
          ++counts[classes[r]];
        }
        const double denom = restarts;
        csv.row({entropy(prejudice_prior), entropy(report_law),
                 counts[static_cast<int>(ProfileClass::AllPrejudice)] / denom,
                 counts[static_cast<int>(ProfileClass::TruthfulRandomise)] / denom,
                 counts[static_cast<int>(ProfileClass::AllRandomise)] / denom,
                 counts[static_cast<int>(ProfileClass::Other)] / denom,
                 nonconverged / denom, static_cast<long long>(restarts), cfg->seed});
      }
      return kExitOk;
    });
  } catch (const std::invalid_argument& e) {
    err << "entropy-sweep: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace crowdgame
