// Payoff estimation, best-response and equilibrium verification, dominance
// checks under anchored mechanisms, the paired-scenario failure demonstration
// for anchor-free mechanisms, and best-response dynamics for basin estimates.
//
// An agent's payoff is its probability of being identified by the mechanism.
// Deviation comparisons use common random numbers: baseline and deviated
// profiles are evaluated on the same trial substreams, and report generation
// draws all latents in a profile-independent order, so paired trials see the
// same realized world.

#pragma once

#include <string>
#include <vector>

#include "crowdgame/game.hpp"
#include "crowdgame/mechanisms.hpp"

namespace crowdgame {

struct PayoffEstimate {
  double value = 0.0;    // estimated inclusion probability
  double std_err = 0.0;  // sqrt(v (1-v) / trials)
  int trials = 0;
};

struct DeviationReport {
  std::string agent_type;  // "informed" | "uninformed"
  int agent = -1;          // representative agent tested
  Strategy from = Strategy::Randomise;
  Strategy to = Strategy::Randomise;
  PayoffEstimate baseline;
  PayoffEstimate deviated;
  double gain = 0.0;              // deviated.value - baseline.value
  double combined_std_err = 0.0;  // sqrt(baseline.se^2 + deviated.se^2)
  std::string context;            // free-form label (used by the dominance grid)
};

struct EquilibriumVerdict {
  double epsilon = 0.0;
  std::vector<DeviationReport> deviations;
  // True iff every unilateral deviation gain <= epsilon + 2 * combined_std_err.
  bool is_epsilon_equilibrium = true;
};

struct ImpossibilityReport {
  double success_rate_scenario1 = 0.0;  // P(identified set = everyone), truthful world
  double success_rate_scenario2 = 0.0;  // P(identified set = empty), prejudice world
  double combined = 0.0;
  double std_err_scenario1 = 0.0;
  double std_err_scenario2 = 0.0;
  // Two-sample chi-square over pooled per-item report patterns; high values
  // mean the mechanism faces identically distributed reports.
  double distribution_test_pvalue = 1.0;
  int trials = 0;
};

PayoffEstimate estimate_payoff(const GameConfig& cfg, const StrategyProfile& profile,
                               const MechanismHandle& mechanism, int focal_agent,
                               int trials, rng::Stream stream, int threads = 1);

struct BestResponse {
  Strategy strategy = Strategy::Randomise;
  std::vector<std::pair<Strategy, PayoffEstimate>> payoffs;
};

// Evaluates every legal candidate strategy of `agent` against the fixed
// opponents, on common random numbers. Ties keep the current strategy.
BestResponse best_response(const GameConfig& cfg, const StrategyProfile& profile,
                           const MechanismHandle& mechanism, int agent, int trials,
                           rng::Stream stream, int threads = 1);

// Tests every unilateral pure deviation of one representative agent per type.
EquilibriumVerdict verify_equilibrium(const GameConfig& cfg, const StrategyProfile& profile,
                                      const MechanismHandle& mechanism, double epsilon,
                                      int trials, rng::Stream stream, int threads = 1);

// All type-symmetric profiles: informed in {Truthful, Prejudiced, Randomise}
// crossed with uninformed in {Prejudiced, Randomise}.
std::vector<StrategyProfile> type_symmetric_grid(const AgentRoster& roster);

// For each opponent profile, compares a focal informed agent's Truthful
// payoff against Prejudiced and Randomise. A positive gain flags a grid
// point where Truthful is not weakly best.
std::vector<DeviationReport> check_dominance_truthful(
    const GameConfig& cfg, const MechanismHandle& mechanism,
    const std::vector<StrategyProfile>& opponent_grid, int trials, rng::Stream stream,
    int threads = 1);

// Scenario-2 truth prior: moves min(0.2, top mass) from the most probable
// label of base to the second most probable, so the priors provably differ.
Distribution shifted_prior(const Distribution& base);

// Paired scenarios with identical report laws: (1) everyone informed and
// truthful with truth prior `base_dist` and an identity signal; (2) everyone
// playing the shared prejudice with prejudice prior `base_dist`. Success
// means identifying everyone in (1) and no one in (2). Only anchor-free
// mechanisms are admissible.
ImpossibilityReport impossibility_demo(int k, const Distribution& base_dist, int n_agents,
                                       int n_items, const MechanismHandle& mechanism,
                                       int trials, rng::Stream stream, int threads = 1);

// --- best-response dynamics (equilibrium-selection diagnostics) ---

enum class ProfileClass { AllPrejudice, TruthfulRandomise, AllRandomise, Other };
ProfileClass classify_profile(const AgentRoster& roster, const StrategyProfile& profile);

// Uniform over each agent's legal strategies.
StrategyProfile random_profile(const AgentRoster& roster, rng::Stream& stream);

struct DynamicsOptions {
  int max_sweeps = 20;
  int trials = 800;            // per payoff estimate inside the dynamics
  double switch_margin = 0.02; // required estimated gain before switching
  int threads = 1;
};

struct DynamicsResult {
  StrategyProfile profile;  // final profile
  int sweeps = 0;           // sweeps executed
  bool converged = false;   // a full sweep made no switch (or max_sweeps == 0)
};

// Asynchronous best-response sweeps in agent order until a no-switch sweep
// or the sweep cap. max_sweeps == 0 just classifies the initial profile.
DynamicsResult best_response_dynamics(const GameConfig& cfg, StrategyProfile initial,
                                      const MechanismHandle& mechanism,
                                      const DynamicsOptions& options, rng::Stream stream);

}  // namespace crowdgame
