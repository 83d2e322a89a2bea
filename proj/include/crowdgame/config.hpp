// Experiment configuration: a flat sectioned text format (grammar documented
// in the README) plus builders that turn a parsed config into the simulation
// objects. Parsing is line-anchored: errors carry the offending line number.

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "crowdgame/game.hpp"
#include "crowdgame/mechanisms.hpp"

namespace crowdgame {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string source, int line, const std::string& msg)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + msg),
        source_(std::move(source)),
        line_(line) {}
  const std::string& source() const { return source_; }
  int line() const { return line_; }

 private:
  std::string source_;
  int line_;
};

struct ExperimentConfig {
  // [world]
  int k = 2;
  Eigen::VectorXd truth_prior;
  Eigen::VectorXd prejudice_prior;
  Eigen::MatrixXd signal_rows;  // k x k, row y = signal law given truth y

  // [roster]
  int n_agents = 0;
  std::vector<int> informed;  // canonical: explicit sorted indices

  // [assignment]
  int n_items = 0;
  int labels_per_item = 0;  // 0 = complete

  // [game]
  PrejudiceMode prejudice_mode = PrejudiceMode::Shared;

  // [profile]
  Strategy informed_strategy = Strategy::Truthful;
  Strategy uninformed_strategy = Strategy::Randomise;
  std::map<int, Strategy> strategy_overrides;

  // [mechanism]
  std::string mechanism = "agreement";
  double threshold = 0.8;
  double accuracy_cut = 0.8;
  double agree_cut = 0.8;
  double match_cut = 0.9;
  int gold_items = 0;
  int anchored_items = 0;
  int max_rounds = 0;  // 0 = one round per agent

  // [run]
  long long trials = 1000;
  std::uint64_t seed = 1;
  std::string out;
  std::vector<int> items_grid;
  double epsilon = 0.02;

  // [sweep]
  std::vector<Eigen::VectorXd> sweep_prejudice_priors;
  int dynamics_steps = 20;
  int restarts = 50;
  int dynamics_trials = 800;
  double switch_margin = 0.02;

  bool operator==(const ExperimentConfig& other) const;
};

ExperimentConfig parse_config_text(const std::string& text, const std::string& source_name);
ExperimentConfig parse_config_file(const std::string& path);

// Canonical form: fixed section/key order, %.17g numbers, explicit signal
// rows and informed indices. parse(serialize(c)) == c.
std::string serialize_config(const ExperimentConfig& cfg);

WorldDistribution build_world(const ExperimentConfig& cfg);
AgentRoster build_roster(const ExperimentConfig& cfg);
// Complete when labels_per_item = 0, otherwise make_assignment on the stream.
Assignment build_assignment(const ExperimentConfig& cfg, int n_items, rng::Stream& stream);
StrategyProfile build_profile(const ExperimentConfig& cfg, const AgentRoster& roster);
MechanismHandle build_mechanism(const ExperimentConfig& cfg);
GameConfig build_game_config(const ExperimentConfig& cfg, rng::Stream assignment_stream);

}  // namespace crowdgame
