#include "crowdgame/game.hpp"

#include <algorithm>
#include <stdexcept>

namespace crowdgame {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Truthful: return "truthful";
    case Strategy::Prejudiced: return "prejudiced";
    case Strategy::Randomise: return "randomise";
  }
  return "?";
}

std::string to_string(PrejudiceMode m) {
  return m == PrejudiceMode::Shared ? "shared" : "iid";
}

Strategy strategy_from_string(const std::string& name) {
  if (name == "truthful") return Strategy::Truthful;
  if (name == "prejudiced") return Strategy::Prejudiced;
  if (name == "randomise") return Strategy::Randomise;
  throw std::invalid_argument("unknown strategy '" + name +
                              "' (expected truthful | prejudiced | randomise)");
}

PrejudiceMode prejudice_mode_from_string(const std::string& name) {
  if (name == "shared") return PrejudiceMode::Shared;
  if (name == "iid") return PrejudiceMode::IID;
  throw std::invalid_argument("unknown prejudice mode '" + name + "' (expected shared | iid)");
}

AgentRoster::AgentRoster(int n_agents, std::vector<int> informed)
    : n_(n_agents), informed_(std::move(informed)), flags_(n_agents, 0) {
  require(n_ >= 1, "roster needs at least one agent");
  std::sort(informed_.begin(), informed_.end());
  informed_.erase(std::unique(informed_.begin(), informed_.end()), informed_.end());
  for (int a : informed_) {
    require(a >= 0 && a < n_, "informed agent index " + std::to_string(a) + " out of range");
    flags_[a] = 1;
  }
}

int AgentRoster::first_informed() const {
  return informed_.empty() ? -1 : informed_.front();
}

int AgentRoster::first_uninformed() const {
  for (int a = 0; a < n_; ++a) {
    if (!flags_[a]) return a;
  }
  return -1;
}

Assignment::Assignment(int n_agents, int n_items, std::vector<std::vector<int>> agents_of_item)
    : n_agents_(n_agents), n_items_(n_items), agents_of_item_(std::move(agents_of_item)) {
  require(n_agents_ >= 1 && n_items_ >= 1, "assignment needs agents and items");
  require(static_cast<int>(agents_of_item_.size()) == n_items_,
          "agents_of_item must list every item");
  items_of_agent_.assign(n_agents_, {});
  for (int j = 0; j < n_items_; ++j) {
    auto& agents = agents_of_item_[j];
    require(!agents.empty(), "item " + std::to_string(j) + " has no labellers");
    std::sort(agents.begin(), agents.end());
    require(std::adjacent_find(agents.begin(), agents.end()) == agents.end(),
            "item " + std::to_string(j) + " lists an agent twice");
    for (int a : agents) {
      require(a >= 0 && a < n_agents_, "agent index out of range in assignment");
      items_of_agent_[a].push_back(j);
    }
  }
  for (int a = 0; a < n_agents_; ++a) {
    require(!items_of_agent_[a].empty(),
            "agent " + std::to_string(a) + " has no items; infeasible assignment");
  }
}

Assignment Assignment::complete(int n_agents, int n_items) {
  std::vector<int> all(n_agents);
  for (int a = 0; a < n_agents; ++a) all[a] = a;
  return Assignment(n_agents, n_items, std::vector<std::vector<int>>(n_items, all));
}

bool Assignment::covers(int agent, int item) const {
  const auto& agents = agents_of_item_[item];
  return std::binary_search(agents.begin(), agents.end(), agent);
}

bool Assignment::is_complete() const {
  for (const auto& agents : agents_of_item_) {
    if (static_cast<int>(agents.size()) != n_agents_) return false;
  }
  return true;
}

Assignment make_assignment(int n_agents, int n_items, int labels_per_item,
                           rng::Stream& stream) {
  require(labels_per_item >= 1 && labels_per_item <= n_agents,
          "labels_per_item must lie in [1, n_agents]");
  std::vector<std::vector<int>> agents_of_item(n_items);
  std::vector<char> used(n_agents, 0);
  for (int j = 0; j < n_items; ++j) {
    auto& agents = agents_of_item[j];
    std::fill(used.begin(), used.end(), 0);
    const int base = j % n_agents;
    agents.push_back(base);
    used[base] = 1;
    if (labels_per_item >= 2) {
      const int next = (base + 1) % n_agents;
      agents.push_back(next);
      used[next] = 1;
    }
    while (static_cast<int>(agents.size()) < labels_per_item) {
      const int a = stream.uniform_int(n_agents);
      if (!used[a]) {
        used[a] = 1;
        agents.push_back(a);
      }
    }
  }
  // Constructor rejects the infeasible case of an agent with no items.
  return Assignment(n_agents, n_items, std::move(agents_of_item));
}

StrategyProfile::StrategyProfile(std::vector<Strategy> per_agent)
    : per_agent_(std::move(per_agent)) {
  require(!per_agent_.empty(), "profile must cover at least one agent");
}

StrategyProfile StrategyProfile::symmetric(const AgentRoster& roster, Strategy informed,
                                           Strategy uninformed) {
  std::vector<Strategy> per_agent(roster.agent_count(), uninformed);
  for (int a : roster.informed()) per_agent[a] = informed;
  StrategyProfile profile(std::move(per_agent));
  profile.validate_for(roster);
  return profile;
}

StrategyProfile StrategyProfile::with_agent(int agent, Strategy s) const {
  std::vector<Strategy> per_agent = per_agent_;
  per_agent.at(agent) = s;
  return StrategyProfile(std::move(per_agent));
}

void StrategyProfile::validate_for(const AgentRoster& roster) const {
  require(agent_count() == roster.agent_count(), "profile size must match the roster");
  for (int a = 0; a < agent_count(); ++a) {
    require(per_agent_[a] != Strategy::Truthful || roster.is_informed(a),
            "uninformed agent " + std::to_string(a) + " cannot play truthful");
  }
}

GameConfig::GameConfig(WorldDistribution w, AgentRoster r, Assignment a, PrejudiceMode mode)
    : world(std::move(w)), roster(std::move(r)), assignment(std::move(a)),
      prejudice_mode(mode) {
  require(assignment.agent_count() == roster.agent_count(),
          "assignment and roster disagree on the agent count");
}

ReportMatrix::ReportMatrix(Eigen::MatrixXi reports, Eigen::VectorXi truth,
                           Eigen::MatrixXi signals, Eigen::MatrixXi prejudice_draws,
                           PrejudiceMode mode)
    : reports_(std::move(reports)),
      truth_(std::move(truth)),
      signals_(std::move(signals)),
      prejudice_(std::move(prejudice_draws)),
      mode_(mode) {}

bool ReportMatrix::operator==(const ReportMatrix& other) const {
  return mode_ == other.mode_ && truth_ == other.truth_ && reports_ == other.reports_ &&
         signals_ == other.signals_ && prejudice_ == other.prejudice_;
}

ReportMatrix generate_reports(const GameConfig& cfg, const StrategyProfile& profile,
                              rng::Stream& stream) {
  profile.validate_for(cfg.roster);
  const int n_agents = cfg.roster.agent_count();
  const int n_items = cfg.assignment.item_count();
  const bool shared = cfg.prejudice_mode == PrejudiceMode::Shared;

  Eigen::VectorXi truth(n_items);
  Eigen::MatrixXi prejudice =
      Eigen::MatrixXi::Constant(shared ? 1 : n_agents, n_items, -1);
  Eigen::MatrixXi signals = Eigen::MatrixXi::Constant(n_agents, n_items, -1);
  Eigen::MatrixXi random_draws = Eigen::MatrixXi::Constant(n_agents, n_items, -1);

  // Fixed draw order per item, independent of the profile: truth, prejudice,
  // signals, randomise fallbacks. Every latent is drawn for every agent in
  // the incidence whether or not its strategy consumes it.
  for (int j = 0; j < n_items; ++j) {
    const auto& agents = cfg.assignment.agents_of_item(j);
    truth[j] = sample_label(cfg.world.truth_prior(), stream);
    if (shared) {
      prejudice(0, j) = sample_label(cfg.world.prejudice_prior(), stream);
    } else {
      for (int a : agents) prejudice(a, j) = sample_label(cfg.world.prejudice_prior(), stream);
    }
    for (int a : agents) {
      if (cfg.roster.is_informed(a))
        signals(a, j) = sample_label(cfg.world.signal_channel().row(truth[j]), stream);
    }
    for (int a : agents) random_draws(a, j) = sample_label(cfg.world.truth_prior(), stream);
  }

  Eigen::MatrixXi reports = Eigen::MatrixXi::Constant(n_agents, n_items, -1);
  for (int j = 0; j < n_items; ++j) {
    for (int a : cfg.assignment.agents_of_item(j)) {
      switch (profile.of(a)) {
        case Strategy::Truthful:
          reports(a, j) = signals(a, j);
          break;
        case Strategy::Prejudiced:
          reports(a, j) = shared ? prejudice(0, j) : prejudice(a, j);
          break;
        case Strategy::Randomise:
          reports(a, j) = random_draws(a, j);
          break;
      }
    }
  }

  return ReportMatrix(std::move(reports), std::move(truth), std::move(signals),
                      std::move(prejudice), cfg.prejudice_mode);
}

std::vector<int> truthful_informed_set(const AgentRoster& roster,
                                       const StrategyProfile& profile) {
  std::vector<int> result;
  for (int a : roster.informed()) {
    if (profile.of(a) == Strategy::Truthful) result.push_back(a);
  }
  return result;
}

}  // namespace crowdgame
