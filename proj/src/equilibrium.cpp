#include "crowdgame/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "crowdgame/parallel.hpp"
#include "crowdgame/stats.hpp"

namespace crowdgame {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

std::vector<Strategy> legal_strategies(const AgentRoster& roster, int agent) {
  if (roster.is_informed(agent))
    return {Strategy::Truthful, Strategy::Prejudiced, Strategy::Randomise};
  return {Strategy::Prejudiced, Strategy::Randomise};
}

PayoffEstimate finish_estimate(long long hits, int trials) {
  PayoffEstimate est;
  est.trials = trials;
  est.value = static_cast<double>(hits) / trials;
  est.std_err = std::sqrt(est.value * (1.0 - est.value) / trials);
  return est;
}

DeviationReport make_deviation(const GameConfig& cfg, const StrategyProfile& profile,
                               const MechanismHandle& mechanism, int agent, Strategy to,
                               int trials, const rng::Stream& stream, int threads,
                               const PayoffEstimate& baseline) {
  DeviationReport report;
  report.agent_type = cfg.roster.is_informed(agent) ? "informed" : "uninformed";
  report.agent = agent;
  report.from = profile.of(agent);
  report.to = to;
  report.baseline = baseline;
  report.deviated = estimate_payoff(cfg, profile.with_agent(agent, to), mechanism, agent,
                                    trials, stream, threads);
  report.gain = report.deviated.value - report.baseline.value;
  report.combined_std_err = std::sqrt(report.baseline.std_err * report.baseline.std_err +
                                      report.deviated.std_err * report.deviated.std_err);
  return report;
}

}  // namespace

PayoffEstimate estimate_payoff(const GameConfig& cfg, const StrategyProfile& profile,
                               const MechanismHandle& mechanism, int focal_agent,
                               int trials, rng::Stream stream, int threads) {
  require(trials >= 1, "estimate_payoff needs trials >= 1");
  require(focal_agent >= 0 && focal_agent < cfg.roster.agent_count(),
          "focal agent out of range");
  profile.validate_for(cfg.roster);

  std::vector<char> hit(trials, 0);
  parallel_for(trials, threads, [&](int t) {
    rng::Stream trial_stream = stream.fork(static_cast<std::uint64_t>(t));
    const ReportMatrix rm = generate_reports(cfg, profile, trial_stream);
    const MechanismOutcome outcome = run_mechanism(mechanism, rm, cfg.assignment);
    hit[t] = outcome.contains(focal_agent) ? 1 : 0;
  });

  long long hits = 0;
  for (char h : hit) hits += h;
  return finish_estimate(hits, trials);
}

BestResponse best_response(const GameConfig& cfg, const StrategyProfile& profile,
                           const MechanismHandle& mechanism, int agent, int trials,
                           rng::Stream stream, int threads) {
  profile.validate_for(cfg.roster);
  const Strategy current = profile.of(agent);

  BestResponse result;
  result.strategy = current;
  for (Strategy s : legal_strategies(cfg.roster, agent)) {
    result.payoffs.emplace_back(s, estimate_payoff(cfg, profile.with_agent(agent, s),
                                                   mechanism, agent, trials, stream, threads));
  }
  // argmax; ties keep the current strategy
  double best_value = 0.0;
  for (const auto& [s, est] : result.payoffs) {
    if (s == current) best_value = est.value;
  }
  for (const auto& [s, est] : result.payoffs) {
    if (s != current && est.value > best_value) {
      best_value = est.value;
      result.strategy = s;
    }
  }
  return result;
}

EquilibriumVerdict verify_equilibrium(const GameConfig& cfg, const StrategyProfile& profile,
                                      const MechanismHandle& mechanism, double epsilon,
                                      int trials, rng::Stream stream, int threads) {
  require(epsilon > 0.0, "verify_equilibrium needs epsilon > 0");
  profile.validate_for(cfg.roster);

  EquilibriumVerdict verdict;
  verdict.epsilon = epsilon;

  std::vector<int> representatives;
  if (cfg.roster.first_informed() >= 0) representatives.push_back(cfg.roster.first_informed());
  if (cfg.roster.first_uninformed() >= 0)
    representatives.push_back(cfg.roster.first_uninformed());

  for (int agent : representatives) {
    const PayoffEstimate baseline =
        estimate_payoff(cfg, profile, mechanism, agent, trials, stream, threads);
    for (Strategy s : legal_strategies(cfg.roster, agent)) {
      if (s == profile.of(agent)) continue;
      DeviationReport report = make_deviation(cfg, profile, mechanism, agent, s, trials,
                                              stream, threads, baseline);
      if (report.gain > epsilon + 2.0 * report.combined_std_err)
        verdict.is_epsilon_equilibrium = false;
      verdict.deviations.push_back(std::move(report));
    }
  }
  return verdict;
}

std::vector<StrategyProfile> type_symmetric_grid(const AgentRoster& roster) {
  std::vector<StrategyProfile> grid;
  const bool has_informed = roster.first_informed() >= 0;
  const bool has_uninformed = roster.first_uninformed() >= 0;
  const std::vector<Strategy> informed_choices =
      has_informed
          ? std::vector<Strategy>{Strategy::Truthful, Strategy::Prejudiced, Strategy::Randomise}
          : std::vector<Strategy>{Strategy::Randomise};
  const std::vector<Strategy> uninformed_choices =
      has_uninformed ? std::vector<Strategy>{Strategy::Prejudiced, Strategy::Randomise}
                     : std::vector<Strategy>{Strategy::Randomise};
  for (Strategy si : informed_choices) {
    for (Strategy su : uninformed_choices) {
      grid.push_back(StrategyProfile::symmetric(roster, si, su));
      if (!has_uninformed) break;
    }
    if (!has_informed) break;
  }
  return grid;
}

std::vector<DeviationReport> check_dominance_truthful(
    const GameConfig& cfg, const MechanismHandle& mechanism,
    const std::vector<StrategyProfile>& opponent_grid, int trials, rng::Stream stream,
    int threads) {
  const int focal = cfg.roster.first_informed();
  require(focal >= 0, "dominance check needs an informed agent");
  require(mechanism.uses_anchors(), "dominance check is defined for anchored mechanisms");

  std::vector<DeviationReport> table;
  for (std::size_t g = 0; g < opponent_grid.size(); ++g) {
    const StrategyProfile& opponents = opponent_grid[g];
    opponents.validate_for(cfg.roster);
    rng::Stream grid_stream = stream.fork(g);
    const StrategyProfile truthful_profile = opponents.with_agent(focal, Strategy::Truthful);
    const PayoffEstimate truthful =
        estimate_payoff(cfg, truthful_profile, mechanism, focal, trials, grid_stream, threads);
    const std::string context = "opponents:informed=" +
                                to_string(opponents.of(focal)) +
                                ",uninformed=" +
                                (cfg.roster.first_uninformed() >= 0
                                     ? to_string(opponents.of(cfg.roster.first_uninformed()))
                                     : std::string("none"));
    for (Strategy s : {Strategy::Prejudiced, Strategy::Randomise}) {
      DeviationReport report = make_deviation(cfg, truthful_profile, mechanism, focal, s,
                                              trials, grid_stream, threads, truthful);
      report.context = context;
      table.push_back(std::move(report));
    }
  }
  return table;
}

Distribution shifted_prior(const Distribution& base) {
  const int k = base.size();
  int top = 0, second = -1;
  for (int i = 1; i < k; ++i) {
    if (base[i] > base[top]) top = i;
  }
  for (int i = 0; i < k; ++i) {
    if (i == top) continue;
    if (second < 0 || base[i] > base[second]) second = i;
  }
  const double mass = std::min(0.2, base[top]);
  Eigen::VectorXd shifted = base.probs();
  shifted[top] -= mass;
  shifted[second] += mass;
  return Distribution(std::move(shifted));
}

ImpossibilityReport impossibility_demo(int k, const Distribution& base_dist, int n_agents,
                                       int n_items, const MechanismHandle& mechanism,
                                       int trials, rng::Stream stream, int threads) {
  require(!mechanism.uses_anchors(),
          "the paired-scenario demonstration is defined for anchor-free mechanisms; '" +
              mechanism.name + "' requests anchors");
  require(base_dist.size() == k, "base distribution size must match the label count");
  require(n_agents >= 1 && n_items >= 1 && trials >= 1, "demo needs agents, items, trials");

  const LabelSpace labels(k);
  const Distribution other = shifted_prior(base_dist);
  const ConditionalTable identity = ConditionalTable::identity(k);
  const Assignment assignment = Assignment::complete(n_agents, n_items);

  std::vector<int> everyone(n_agents);
  for (int a = 0; a < n_agents; ++a) everyone[a] = a;

  // Scenario 1: everyone informed and truthful; truth prior = base_dist.
  const GameConfig cfg1(WorldDistribution(labels, base_dist, other, identity),
                        AgentRoster(n_agents, everyone), assignment, PrejudiceMode::Shared);
  const StrategyProfile truthful =
      StrategyProfile::symmetric(cfg1.roster, Strategy::Truthful, Strategy::Randomise);

  // Scenario 2: everyone plays the shared prejudice; prejudice prior = base_dist.
  const GameConfig cfg2(WorldDistribution(labels, other, base_dist, identity),
                        AgentRoster(n_agents, {}), assignment, PrejudiceMode::Shared);
  const StrategyProfile prejudiced =
      StrategyProfile::symmetric(cfg2.roster, Strategy::Prejudiced, Strategy::Prejudiced);

  struct TrialResult {
    char success = 0;
    std::vector<int> pattern_of_item;  // pattern key index resolved later
    std::vector<std::vector<int>> raw_patterns;
  };

  // Pattern = the whole report column of an item. Counted across trials and
  // compared between scenarios.
  std::map<std::vector<int>, int> pattern_ids;
  std::vector<std::vector<long long>> pattern_counts(2);

  double rates[2] = {0.0, 0.0};
  double errs[2] = {0.0, 0.0};

  for (int scenario = 0; scenario < 2; ++scenario) {
    const GameConfig& cfg = scenario == 0 ? cfg1 : cfg2;
    const StrategyProfile& profile = scenario == 0 ? truthful : prejudiced;
    rng::Stream scenario_stream = stream.fork(scenario + 1);

    std::vector<char> success(trials, 0);
    std::vector<std::vector<std::vector<int>>> patterns(trials);
    parallel_for(trials, threads, [&](int t) {
      rng::Stream trial_stream = scenario_stream.fork(static_cast<std::uint64_t>(t));
      const ReportMatrix rm = generate_reports(cfg, profile, trial_stream);
      const MechanismOutcome outcome = run_mechanism(mechanism, rm, assignment);
      success[t] = scenario == 0
                       ? (static_cast<int>(outcome.identified.size()) == n_agents ? 1 : 0)
                       : (outcome.identified.empty() ? 1 : 0);
      auto& trial_patterns = patterns[t];
      trial_patterns.resize(n_items);
      for (int j = 0; j < n_items; ++j) {
        std::vector<int> column(n_agents);
        for (int a = 0; a < n_agents; ++a) column[a] = rm.reports()(a, j);
        trial_patterns[j] = std::move(column);
      }
    });

    long long hits = 0;
    for (char s : success) hits += s;
    const double rate = static_cast<double>(hits) / trials;
    rates[scenario] = rate;
    errs[scenario] = std::sqrt(rate * (1.0 - rate) / trials);

    for (const auto& trial_patterns : patterns) {
      for (const auto& column : trial_patterns) {
        const auto [it, inserted] =
            pattern_ids.emplace(column, static_cast<int>(pattern_ids.size()));
        const int id = it->second;
        for (auto& counts : pattern_counts) {
          if (static_cast<int>(counts.size()) <= id) counts.resize(id + 1, 0);
        }
        ++pattern_counts[scenario][id];
      }
    }
  }

  for (auto& counts : pattern_counts) counts.resize(pattern_ids.size(), 0);

  ImpossibilityReport report;
  report.trials = trials;
  report.success_rate_scenario1 = rates[0];
  report.success_rate_scenario2 = rates[1];
  report.combined = rates[0] + rates[1];
  report.std_err_scenario1 = errs[0];
  report.std_err_scenario2 = errs[1];
  report.distribution_test_pvalue =
      stats::chi_square_homogeneity(pattern_counts[0], pattern_counts[1]).p_value;
  return report;
}

ProfileClass classify_profile(const AgentRoster& roster, const StrategyProfile& profile) {
  bool all_prejudice = true, all_randomise = true, truthful_randomise = true;
  for (int a = 0; a < roster.agent_count(); ++a) {
    const Strategy s = profile.of(a);
    all_prejudice &= s == Strategy::Prejudiced;
    all_randomise &= s == Strategy::Randomise;
    truthful_randomise &=
        roster.is_informed(a) ? s == Strategy::Truthful : s == Strategy::Randomise;
  }
  if (all_prejudice) return ProfileClass::AllPrejudice;
  if (truthful_randomise) return ProfileClass::TruthfulRandomise;
  if (all_randomise) return ProfileClass::AllRandomise;
  return ProfileClass::Other;
}

StrategyProfile random_profile(const AgentRoster& roster, rng::Stream& stream) {
  std::vector<Strategy> per_agent(roster.agent_count());
  for (int a = 0; a < roster.agent_count(); ++a) {
    const auto legal = legal_strategies(roster, a);
    per_agent[a] = legal[stream.uniform_int(static_cast<int>(legal.size()))];
  }
  return StrategyProfile(std::move(per_agent));
}

DynamicsResult best_response_dynamics(const GameConfig& cfg, StrategyProfile initial,
                                      const MechanismHandle& mechanism,
                                      const DynamicsOptions& options, rng::Stream stream) {
  initial.validate_for(cfg.roster);
  DynamicsResult result{std::move(initial), 0, options.max_sweeps == 0};

  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    bool switched = false;
    rng::Stream sweep_stream = stream.fork(static_cast<std::uint64_t>(sweep));
    for (int agent = 0; agent < cfg.roster.agent_count(); ++agent) {
      const Strategy current = result.profile.of(agent);
      const BestResponse br =
          best_response(cfg, result.profile, mechanism, agent,
                        options.trials, sweep_stream.fork(static_cast<std::uint64_t>(agent)),
                        options.threads);
      double current_value = 0.0;
      for (const auto& [s, est] : br.payoffs) {
        if (s == current) current_value = est.value;
      }
      // switch only on a clear estimated improvement over the current play
      Strategy best = current;
      double best_value = current_value + options.switch_margin;
      for (const auto& [s, est] : br.payoffs) {
        if (s != current && est.value > best_value) {
          best = s;
          best_value = est.value;
        }
      }
      if (best != current) {
        result.profile = result.profile.with_agent(agent, best);
        switched = true;
      }
    }
    result.sweeps = sweep + 1;
    if (!switched) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace crowdgame
