// One-shot labelling game repeated over independent items: agent roster,
// agent-item assignment, the three pure strategies, and report generation.

#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "crowdgame/probcore.hpp"
#include "crowdgame/rng.hpp"

namespace crowdgame {

enum class Strategy { Truthful, Prejudiced, Randomise };
enum class PrejudiceMode { Shared, IID };

std::string to_string(Strategy s);
std::string to_string(PrejudiceMode m);
Strategy strategy_from_string(const std::string& name);
PrejudiceMode prejudice_mode_from_string(const std::string& name);

// Agents 0..agent_count()-1, with the informed subset.
class AgentRoster {
 public:
  AgentRoster(int n_agents, std::vector<int> informed);

  int agent_count() const { return n_; }
  const std::vector<int>& informed() const { return informed_; }
  bool is_informed(int agent) const { return flags_[agent] != 0; }
  // Lowest-index agent of each type, -1 if the type is absent.
  int first_informed() const;
  int first_uninformed() const;

  bool operator==(const AgentRoster& other) const {
    return n_ == other.n_ && informed_ == other.informed_;
  }

 private:
  int n_;
  std::vector<int> informed_;  // sorted, unique
  std::vector<char> flags_;
};

// Which agents label which items. Every item has at least one labeller and
// every agent at least one item.
class Assignment {
 public:
  Assignment(int n_agents, int n_items, std::vector<std::vector<int>> agents_of_item);
  static Assignment complete(int n_agents, int n_items);

  int agent_count() const { return n_agents_; }
  int item_count() const { return n_items_; }
  const std::vector<int>& agents_of_item(int item) const { return agents_of_item_[item]; }
  const std::vector<int>& items_of_agent(int agent) const { return items_of_agent_[agent]; }
  bool covers(int agent, int item) const;
  bool is_complete() const;

 private:
  int n_agents_;
  int n_items_;
  std::vector<std::vector<int>> agents_of_item_;  // sorted per item
  std::vector<std::vector<int>> items_of_agent_;
};

// Each item gets labels_per_item distinct agents: a round-robin pair
// (item, item+1 mod n_agents) keeps the co-labelling graph connected whenever
// labels_per_item >= 2 and n_items >= n_agents; the remaining slots are drawn
// uniformly. Rejects parameter sets that would leave an agent without items.
Assignment make_assignment(int n_agents, int n_items, int labels_per_item,
                           rng::Stream& stream);

// Per-agent strategy choice. Truthful is only legal for informed agents.
class StrategyProfile {
 public:
  explicit StrategyProfile(std::vector<Strategy> per_agent);
  static StrategyProfile symmetric(const AgentRoster& roster, Strategy informed,
                                   Strategy uninformed);

  Strategy of(int agent) const { return per_agent_[agent]; }
  int agent_count() const { return static_cast<int>(per_agent_.size()); }
  StrategyProfile with_agent(int agent, Strategy s) const;
  // Throws std::invalid_argument if an uninformed agent is mapped to Truthful
  // or the sizes disagree.
  void validate_for(const AgentRoster& roster) const;

  bool operator==(const StrategyProfile& other) const = default;

 private:
  std::vector<Strategy> per_agent_;
};

struct GameConfig {
  WorldDistribution world;
  AgentRoster roster;
  Assignment assignment;
  PrejudiceMode prejudice_mode = PrejudiceMode::Shared;

  GameConfig(WorldDistribution w, AgentRoster r, Assignment a, PrejudiceMode mode);
};

// Realized draws and reports of one game. Matrices are agent x item with -1
// outside the assignment incidence (and, for signals, for uninformed agents).
// Mechanisms receive only the reports() view plus whatever anchors they
// declare; truth, signals and prejudice draws exist for evaluation.
class ReportMatrix {
 public:
  ReportMatrix(Eigen::MatrixXi reports, Eigen::VectorXi truth, Eigen::MatrixXi signals,
               Eigen::MatrixXi prejudice_draws, PrejudiceMode mode);

  const Eigen::MatrixXi& reports() const { return reports_; }
  const Eigen::VectorXi& truth() const { return truth_; }
  const Eigen::MatrixXi& signals() const { return signals_; }
  // Shared mode: 1 x n_items; IID mode: n_agents x n_items.
  const Eigen::MatrixXi& prejudice_draws() const { return prejudice_; }
  PrejudiceMode prejudice_mode() const { return mode_; }
  int item_count() const { return static_cast<int>(truth_.size()); }
  int agent_count() const { return static_cast<int>(reports_.rows()); }

  bool operator==(const ReportMatrix& other) const;

 private:
  Eigen::MatrixXi reports_;
  Eigen::VectorXi truth_;
  Eigen::MatrixXi signals_;
  Eigen::MatrixXi prejudice_;
  PrejudiceMode mode_;
};

// Plays every item as an independent game: truth from P(Y), prejudice draws
// per mode, signals for informed agents, and a report per (agent, item) in
// the incidence. All latent draws happen in a fixed order that does not
// depend on the profile, so two profiles evaluated on equal streams see the
// same realized world (common random numbers for deviation tests).
ReportMatrix generate_reports(const GameConfig& cfg, const StrategyProfile& profile,
                              rng::Stream& stream);

// Agents that are informed and playing Truthful under the profile.
std::vector<int> truthful_informed_set(const AgentRoster& roster,
                                       const StrategyProfile& profile);

}  // namespace crowdgame
