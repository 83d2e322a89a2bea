// Mechanisms map a report table to the subset of agents identified as
// informed-and-truthful. Three concrete members plus a pairwise variant:
//
//   agreement            consensus-agreement score, no anchors
//   pairwise_agreement   mean pairwise agreement, no anchors
//   gold_seeded          trust seeded by gold labels, propagated by agreement
//   prejudice_anchored   distrust seeded by observed prejudice, then propagated
//
// Mechanisms are pure functions of (reports, assignment, parameters, declared
// anchors); they never see truth, signals or prejudice draws beyond the
// anchors they request.

#pragma once

#include <Eigen/Dense>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crowdgame/game.hpp"

namespace crowdgame {

struct MechanismOutcome {
  std::vector<int> identified;  // sorted ascending
  // Propagation diagnostics; 0 rounds for one-shot scoring mechanisms.
  int rounds = 0;
  std::vector<int> classified_in_round;  // per agent, -1 if never classified

  bool contains(int agent) const;
};

// Items whose true label the mechanism observes.
struct GoldSet {
  std::map<int, int> items;  // item -> true label
};

// Per item, consensus is the plurality label among that item's reports (ties
// break to the lowest label index; items with fewer than two reporters are
// skipped). An agent is identified when the fraction of its scoreable items
// matching consensus reaches `threshold`. Agents with no scoreable items are
// identified only by a vacuous threshold <= 0.
MechanismOutcome agreement_mechanism(const Eigen::MatrixXi& reports,
                                     const Assignment& assignment, double threshold);

// Same contract, but an agent's score is its mean pairwise agreement with
// co-labellers over all (peer, item) pairs.
MechanismOutcome pairwise_agreement_mechanism(const Eigen::MatrixXi& reports,
                                              const Assignment& assignment,
                                              double threshold);

// Round 0 classifies every agent holding gold items: trusted iff its accuracy
// on them reaches accuracy_cut, rejected otherwise. Later rounds classify
// agents sharing items with already-trusted agents by pooled agreement rate
// against agree_cut. Classification is monotone; the loop stops at a fixed
// point or after max_rounds (<= 0 means one round per agent, which always
// suffices). Identified = trusted; unreached agents stay excluded.
MechanismOutcome gold_seeded_mechanism(const Eigen::MatrixXi& reports,
                                       const Assignment& assignment, const GoldSet& gold,
                                       double accuracy_cut, double agree_cut,
                                       int max_rounds = 0);

// Round 0 classifies every agent holding anchored items: rejected as
// prejudiced iff its match rate with the observed prejudice reaches
// match_cut, provisionally trusted otherwise. Propagation then follows the
// gold-seeded rule. Meaningful in shared-prejudice mode only.
MechanismOutcome prejudice_anchored_mechanism(const Eigen::MatrixXi& reports,
                                              const Assignment& assignment,
                                              const std::map<int, int>& prejudice_obs,
                                              double match_cut, double agree_cut,
                                              int max_rounds = 0);

// Anchors a mechanism declares up front. The evaluation layer extracts them
// from the realized game: gold items expose the true label of the first
// `gold_items` items, prejudice anchors expose the realized shared prejudice
// of the first `anchored_items` items.
struct AnchorRequest {
  int gold_items = 0;
  int anchored_items = 0;
};

struct MechanismHandle {
  std::string name;
  AnchorRequest needs;
  std::function<MechanismOutcome(const Eigen::MatrixXi& reports, const Assignment&,
                                 const GoldSet& gold, const std::map<int, int>& prejudice_obs)>
      fn;

  bool uses_anchors() const { return needs.gold_items > 0 || needs.anchored_items > 0; }
};

MechanismHandle make_agreement_handle(double threshold);
MechanismHandle make_pairwise_agreement_handle(double threshold);
MechanismHandle make_gold_seeded_handle(int gold_items, double accuracy_cut,
                                        double agree_cut, int max_rounds = 0);
MechanismHandle make_prejudice_anchored_handle(int anchored_items, double match_cut,
                                               double agree_cut, int max_rounds = 0);

// Extracts the declared anchors from a realized game and applies the
// mechanism. Throws if the game cannot supply them (too few items, or
// prejudice anchors outside shared mode).
MechanismOutcome run_mechanism(const MechanismHandle& handle, const ReportMatrix& rm,
                               const Assignment& assignment);

struct OddsPoint {
  int n_items = 0;
  std::optional<double> p_ii;
  std::optional<double> p_uu;
  // Haldane-corrected empirical odds (s + 1/2) / (f + 1/2), finite even at
  // estimates of exactly 0 or 1.
  std::optional<double> odds_ii;
  std::optional<double> odds_uu;
};

struct MechanismMetrics {
  // P(identified | informed and truthful) and P(excluded | otherwise),
  // pooled over agents and trials; empty when the conditioning set is empty.
  std::optional<double> p_ii_hat;
  std::optional<double> p_uu_hat;
  int trials = 0;
  std::vector<OddsPoint> odds_ratio_curve;
};

struct EvalOptions {
  std::vector<int> items_grid;  // re-run sizes for the odds curve
  // Builds the assignment for a grid size; defaults to complete assignments
  // when the configured assignment is complete.
  std::function<Assignment(int n_items, rng::Stream&)> assignment_for;
  int curve_trials = 0;  // 0 -> same as trials
  int threads = 1;
};

// Runs `trials` independent games (trial t uses stream.fork(t)) and estimates
// the identification probabilities; optionally re-runs across items_grid for
// the odds curve. Deterministic for fixed stream key and any thread count.
MechanismMetrics evaluate_mechanism(const MechanismHandle& handle, const GameConfig& cfg,
                                    const StrategyProfile& profile, int trials,
                                    rng::Stream stream, const EvalOptions& options = {});

}  // namespace crowdgame
