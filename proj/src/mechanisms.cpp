#include "crowdgame/mechanisms.hpp"

#include <algorithm>
#include <stdexcept>

#include "crowdgame/parallel.hpp"

namespace crowdgame {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// count/total >= cut, robust to the float boundary (e.g. 4/5 vs 0.8).
bool rate_at_least(long long count, long long total, double cut) {
  return static_cast<double>(count) >= cut * static_cast<double>(total) - 1e-9;
}

void require_reports(const Eigen::MatrixXi& reports, const Assignment& assignment) {
  require(reports.rows() == assignment.agent_count() &&
              reports.cols() == assignment.item_count(),
          "report table shape must match the assignment");
  require((reports.array() >= 0).any(), "empty report set");
}

int plurality_label(const Eigen::MatrixXi& reports, const std::vector<int>& agents, int item) {
  int max_label = 0;
  for (int a : agents) max_label = std::max(max_label, reports(a, item));
  std::vector<int> votes(max_label + 1, 0);
  for (int a : agents) ++votes[reports(a, item)];
  int best = 0;
  for (int label = 1; label <= max_label; ++label) {
    if (votes[label] > votes[best]) best = label;  // tie keeps the lower index
  }
  return best;
}

MechanismOutcome score_cut_outcome(const std::vector<long long>& matches,
                                   const std::vector<long long>& totals, double threshold) {
  MechanismOutcome out;
  out.classified_in_round.assign(matches.size(), 0);
  for (int a = 0; a < static_cast<int>(matches.size()); ++a) {
    const bool in = totals[a] > 0 ? rate_at_least(matches[a], totals[a], threshold)
                                  : threshold <= 0.0;
    if (in) out.identified.push_back(a);
  }
  return out;
}

enum class AgentState { Unclassified, Trusted, Rejected };

// Shared propagation step for the seeded mechanisms: classify unclassified
// agents by pooled agreement with the currently trusted set, synchronously
// per round, until nothing changes.
void propagate_by_agreement(const Eigen::MatrixXi& reports, const Assignment& assignment,
                            std::vector<AgentState>& state, double agree_cut,
                            int max_rounds, MechanismOutcome& out) {
  const int n_agents = assignment.agent_count();
  if (max_rounds <= 0) max_rounds = n_agents;
  for (int round = 1; round <= max_rounds; ++round) {
    std::vector<std::pair<int, AgentState>> updates;
    for (int a = 0; a < n_agents; ++a) {
      if (state[a] != AgentState::Unclassified) continue;
      long long shared = 0, agreed = 0;
      for (int j : assignment.items_of_agent(a)) {
        for (int peer : assignment.agents_of_item(j)) {
          if (peer == a || state[peer] != AgentState::Trusted) continue;
          ++shared;
          if (reports(a, j) == reports(peer, j)) ++agreed;
        }
      }
      if (shared == 0) continue;  // unreachable this round
      updates.emplace_back(a, rate_at_least(agreed, shared, agree_cut)
                                  ? AgentState::Trusted
                                  : AgentState::Rejected);
    }
    if (updates.empty()) break;  // fixed point
    for (const auto& [a, s] : updates) {
      state[a] = s;
      out.classified_in_round[a] = round;
    }
    out.rounds = round;
  }
}

MechanismOutcome finish_seeded(const std::vector<AgentState>& state, MechanismOutcome out) {
  for (int a = 0; a < static_cast<int>(state.size()); ++a) {
    if (state[a] == AgentState::Trusted) out.identified.push_back(a);
  }
  return out;
}

std::optional<double> ratio(long long hits, long long total) {
  if (total == 0) return std::nullopt;
  return static_cast<double>(hits) / static_cast<double>(total);
}

std::optional<double> haldane_odds(long long hits, long long total) {
  if (total == 0) return std::nullopt;
  return (static_cast<double>(hits) + 0.5) / (static_cast<double>(total - hits) + 0.5);
}

struct PooledCounts {
  long long ii_hits = 0, ii_total = 0;  // informed-truthful agents identified
  long long uu_hits = 0, uu_total = 0;  // other agents excluded
};

PooledCounts pooled_identification_counts(const MechanismHandle& handle,
                                          const GameConfig& cfg,
                                          const StrategyProfile& profile, int trials,
                                          const rng::Stream& stream, int threads) {
  const int n_agents = cfg.roster.agent_count();
  std::vector<char> in_target(n_agents, 0);
  for (int a : truthful_informed_set(cfg.roster, profile)) in_target[a] = 1;

  std::vector<std::vector<char>> included(trials);
  parallel_for(trials, threads, [&](int t) {
    rng::Stream trial_stream = stream.fork(static_cast<std::uint64_t>(t));
    const ReportMatrix rm = generate_reports(cfg, profile, trial_stream);
    const MechanismOutcome outcome = run_mechanism(handle, rm, cfg.assignment);
    std::vector<char> flags(n_agents, 0);
    for (int a : outcome.identified) flags[a] = 1;
    included[t] = std::move(flags);
  });

  PooledCounts counts;
  for (int t = 0; t < trials; ++t) {
    for (int a = 0; a < n_agents; ++a) {
      if (in_target[a]) {
        ++counts.ii_total;
        counts.ii_hits += included[t][a];
      } else {
        ++counts.uu_total;
        counts.uu_hits += included[t][a] ? 0 : 1;
      }
    }
  }
  return counts;
}

}  // namespace

bool MechanismOutcome::contains(int agent) const {
  return std::binary_search(identified.begin(), identified.end(), agent);
}

MechanismOutcome agreement_mechanism(const Eigen::MatrixXi& reports,
                                     const Assignment& assignment, double threshold) {
  require_reports(reports, assignment);
  const int n_agents = assignment.agent_count();
  std::vector<long long> matches(n_agents, 0), totals(n_agents, 0);
  for (int j = 0; j < assignment.item_count(); ++j) {
    const auto& agents = assignment.agents_of_item(j);
    if (agents.size() < 2) continue;  // no consensus from a lone report
    const int consensus = plurality_label(reports, agents, j);
    for (int a : agents) {
      ++totals[a];
      if (reports(a, j) == consensus) ++matches[a];
    }
  }
  return score_cut_outcome(matches, totals, threshold);
}

MechanismOutcome pairwise_agreement_mechanism(const Eigen::MatrixXi& reports,
                                              const Assignment& assignment,
                                              double threshold) {
  require_reports(reports, assignment);
  const int n_agents = assignment.agent_count();
  std::vector<long long> agreed(n_agents, 0), pairs(n_agents, 0);
  for (int j = 0; j < assignment.item_count(); ++j) {
    const auto& agents = assignment.agents_of_item(j);
    for (std::size_t x = 0; x < agents.size(); ++x) {
      for (std::size_t y = x + 1; y < agents.size(); ++y) {
        const int a = agents[x], b = agents[y];
        const bool same = reports(a, j) == reports(b, j);
        ++pairs[a];
        ++pairs[b];
        agreed[a] += same;
        agreed[b] += same;
      }
    }
  }
  return score_cut_outcome(agreed, pairs, threshold);
}

MechanismOutcome gold_seeded_mechanism(const Eigen::MatrixXi& reports,
                                       const Assignment& assignment, const GoldSet& gold,
                                       double accuracy_cut, double agree_cut,
                                       int max_rounds) {
  require_reports(reports, assignment);
  require(!gold.items.empty(), "gold-seeded mechanism needs a non-empty gold set");
  for (const auto& [item, label] : gold.items) {
    require(item >= 0 && item < assignment.item_count(), "gold item index out of range");
    require(label >= 0, "gold labels must be valid labels");
  }

  const int n_agents = assignment.agent_count();
  std::vector<AgentState> state(n_agents, AgentState::Unclassified);
  MechanismOutcome out;
  out.classified_in_round.assign(n_agents, -1);

  for (int a = 0; a < n_agents; ++a) {
    long long held = 0, correct = 0;
    for (const auto& [item, label] : gold.items) {
      if (reports(a, item) < 0) continue;
      ++held;
      if (reports(a, item) == label) ++correct;
    }
    if (held == 0) continue;
    state[a] = rate_at_least(correct, held, accuracy_cut) ? AgentState::Trusted
                                                          : AgentState::Rejected;
    out.classified_in_round[a] = 0;
  }

  propagate_by_agreement(reports, assignment, state, agree_cut, max_rounds, out);
  return finish_seeded(state, std::move(out));
}

MechanismOutcome prejudice_anchored_mechanism(const Eigen::MatrixXi& reports,
                                              const Assignment& assignment,
                                              const std::map<int, int>& prejudice_obs,
                                              double match_cut, double agree_cut,
                                              int max_rounds) {
  require_reports(reports, assignment);
  require(!prejudice_obs.empty(), "prejudice-anchored mechanism needs observed prejudice");
  for (const auto& [item, label] : prejudice_obs) {
    require(item >= 0 && item < assignment.item_count(), "anchored item index out of range");
    require(label >= 0, "anchored prejudice labels must be valid labels");
  }

  const int n_agents = assignment.agent_count();
  std::vector<AgentState> state(n_agents, AgentState::Unclassified);
  MechanismOutcome out;
  out.classified_in_round.assign(n_agents, -1);

  for (int a = 0; a < n_agents; ++a) {
    long long anchored = 0, matched = 0;
    for (const auto& [item, label] : prejudice_obs) {
      if (reports(a, item) < 0) continue;
      ++anchored;
      if (reports(a, item) == label) ++matched;
    }
    if (anchored == 0) continue;
    state[a] = rate_at_least(matched, anchored, match_cut) ? AgentState::Rejected
                                                           : AgentState::Trusted;
    out.classified_in_round[a] = 0;
  }

  propagate_by_agreement(reports, assignment, state, agree_cut, max_rounds, out);
  return finish_seeded(state, std::move(out));
}

MechanismHandle make_agreement_handle(double threshold) {
  return {"agreement", {},
          [threshold](const Eigen::MatrixXi& reports, const Assignment& assignment,
                      const GoldSet&, const std::map<int, int>&) {
            return agreement_mechanism(reports, assignment, threshold);
          }};
}

MechanismHandle make_pairwise_agreement_handle(double threshold) {
  return {"pairwise_agreement", {},
          [threshold](const Eigen::MatrixXi& reports, const Assignment& assignment,
                      const GoldSet&, const std::map<int, int>&) {
            return pairwise_agreement_mechanism(reports, assignment, threshold);
          }};
}

MechanismHandle make_gold_seeded_handle(int gold_items, double accuracy_cut,
                                        double agree_cut, int max_rounds) {
  if (gold_items <= 0)
    throw std::invalid_argument("gold-seeded mechanism needs gold_items >= 1");
  MechanismHandle handle;
  handle.name = "gold_seeded";
  handle.needs.gold_items = gold_items;
  handle.fn = [accuracy_cut, agree_cut, max_rounds](
                  const Eigen::MatrixXi& reports, const Assignment& assignment,
                  const GoldSet& gold, const std::map<int, int>&) {
    return gold_seeded_mechanism(reports, assignment, gold, accuracy_cut, agree_cut,
                                 max_rounds);
  };
  return handle;
}

MechanismHandle make_prejudice_anchored_handle(int anchored_items, double match_cut,
                                               double agree_cut, int max_rounds) {
  if (anchored_items <= 0)
    throw std::invalid_argument("prejudice-anchored mechanism needs anchored_items >= 1");
  MechanismHandle handle;
  handle.name = "prejudice_anchored";
  handle.needs.anchored_items = anchored_items;
  handle.fn = [match_cut, agree_cut, max_rounds](
                  const Eigen::MatrixXi& reports, const Assignment& assignment,
                  const GoldSet&, const std::map<int, int>& prejudice_obs) {
    return prejudice_anchored_mechanism(reports, assignment, prejudice_obs, match_cut,
                                        agree_cut, max_rounds);
  };
  return handle;
}

MechanismOutcome run_mechanism(const MechanismHandle& handle, const ReportMatrix& rm,
                               const Assignment& assignment) {
  GoldSet gold;
  std::map<int, int> prejudice_obs;
  if (handle.needs.gold_items > 0) {
    require(handle.needs.gold_items <= rm.item_count(),
            "not enough items to supply the requested gold anchors");
    for (int j = 0; j < handle.needs.gold_items; ++j) gold.items[j] = rm.truth()[j];
  }
  if (handle.needs.anchored_items > 0) {
    require(rm.prejudice_mode() == PrejudiceMode::Shared,
            "prejudice anchors exist only in shared-prejudice mode");
    require(handle.needs.anchored_items <= rm.item_count(),
            "not enough items to supply the requested prejudice anchors");
    for (int j = 0; j < handle.needs.anchored_items; ++j)
      prejudice_obs[j] = rm.prejudice_draws()(0, j);
  }
  return handle.fn(rm.reports(), assignment, gold, prejudice_obs);
}

MechanismMetrics evaluate_mechanism(const MechanismHandle& handle, const GameConfig& cfg,
                                    const StrategyProfile& profile, int trials,
                                    rng::Stream stream, const EvalOptions& options) {
  require(trials >= 1, "evaluate_mechanism needs trials >= 1");
  profile.validate_for(cfg.roster);

  MechanismMetrics metrics;
  metrics.trials = trials;

  const PooledCounts main_counts = pooled_identification_counts(
      handle, cfg, profile, trials, stream.fork(0), options.threads);
  metrics.p_ii_hat = ratio(main_counts.ii_hits, main_counts.ii_total);
  metrics.p_uu_hat = ratio(main_counts.uu_hits, main_counts.uu_total);

  if (options.items_grid.empty()) return metrics;

  auto assignment_for = options.assignment_for;
  if (!assignment_for) {
    require(cfg.assignment.is_complete(),
            "items_grid on a non-complete assignment needs an assignment_for factory");
    const int n_agents = cfg.roster.agent_count();
    assignment_for = [n_agents](int n_items, rng::Stream&) {
      return Assignment::complete(n_agents, n_items);
    };
  }
  const int curve_trials = options.curve_trials > 0 ? options.curve_trials : trials;

  for (std::size_t g = 0; g < options.items_grid.size(); ++g) {
    const int n_items = options.items_grid[g];
    rng::Stream grid_stream = stream.fork(1 + g);
    rng::Stream assignment_stream = grid_stream.fork(rng::Lane::World);
    GameConfig grid_cfg(cfg.world, cfg.roster, assignment_for(n_items, assignment_stream),
                        cfg.prejudice_mode);
    const PooledCounts c = pooled_identification_counts(
        handle, grid_cfg, profile, curve_trials, grid_stream.fork(rng::Lane::Mechanism),
        options.threads);
    OddsPoint point;
    point.n_items = n_items;
    point.p_ii = ratio(c.ii_hits, c.ii_total);
    point.p_uu = ratio(c.uu_hits, c.uu_total);
    point.odds_ii = haldane_odds(c.ii_hits, c.ii_total);
    point.odds_uu = haldane_odds(c.uu_hits, c.uu_total);
    metrics.odds_ratio_curve.push_back(point);
  }
  return metrics;
}

}  // namespace crowdgame
