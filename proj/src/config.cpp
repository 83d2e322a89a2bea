#include "crowdgame/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace crowdgame {

namespace {

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
  bool used = false;
};

struct Section {
  int line = 0;  // header line
  std::vector<Entry> entries;
};

using SectionMap = std::map<std::string, Section>;

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

class Parser {
 public:
  Parser(const std::string& text, std::string source) : source_(std::move(source)) {
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    std::string current;
    while (std::getline(in, raw)) {
      ++line_no;
      const auto hash = raw.find('#');
      if (hash != std::string::npos) raw.erase(hash);
      const std::string line = trim(raw);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          fail(line_no, "unterminated section header '" + line + "'");
        current = trim(line.substr(1, line.size() - 2));
        if (current.empty()) fail(line_no, "empty section name");
        if (!sections_.count(current)) sections_[current].line = line_no;
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        fail(line_no, "expected 'key = value', got '" + line + "'");
      if (current.empty()) fail(line_no, "key outside any [section]");
      Entry entry;
      entry.key = trim(line.substr(0, eq));
      entry.value = trim(line.substr(eq + 1));
      entry.line = line_no;
      if (entry.key.empty()) fail(line_no, "empty key");
      sections_[current].entries.push_back(std::move(entry));
    }
  }

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ConfigError(source_, line, msg);
  }

  bool has_section(const std::string& name) const { return sections_.count(name) != 0; }

  Section* section(const std::string& name) {
    auto it = sections_.find(name);
    return it == sections_.end() ? nullptr : &it->second;
  }

  Entry* find(const std::string& section_name, const std::string& key) {
    Section* s = section(section_name);
    if (!s) return nullptr;
    Entry* found = nullptr;
    for (auto& e : s->entries) {
      if (e.key != key) continue;
      if (found) fail(e.line, "duplicate key '" + key + "' in [" + section_name + "]");
      found = &e;
    }
    if (found) found->used = true;
    return found;
  }

  std::vector<Entry*> find_all(const std::string& section_name, const std::string& key) {
    std::vector<Entry*> result;
    if (Section* s = section(section_name)) {
      for (auto& e : s->entries) {
        if (e.key == key) {
          e.used = true;
          result.push_back(&e);
        }
      }
    }
    return result;
  }

  Entry& require(const std::string& section_name, const std::string& key) {
    if (Entry* e = find(section_name, key)) return *e;
    const Section* s = section(section_name);
    fail(s ? s->line : 1, "missing key '" + key + "' in [" + section_name + "]");
  }

  void reject_unused(const std::vector<std::string>& known_sections) {
    for (auto& [name, sec] : sections_) {
      if (std::find(known_sections.begin(), known_sections.end(), name) ==
          known_sections.end())
        fail(sec.line, "unknown section [" + name + "]");
      for (const auto& e : sec.entries) {
        if (!e.used)
          fail(e.line, "unknown key '" + e.key + "' in [" + name + "]");
      }
    }
  }

 private:
  std::string source_;
  SectionMap sections_;
};

long long parse_int(const Parser& parser, const Entry& e) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(e.value.c_str(), &end, 10);
  if (end == e.value.c_str() || *end != '\0' || errno == ERANGE)
    parser.fail(e.line, "'" + e.key + "' must be an integer, got '" + e.value + "'");
  return v;
}

std::uint64_t parse_u64(const Parser& parser, const Entry& e) {
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(e.value.c_str(), &end, 10);
  if (end == e.value.c_str() || *end != '\0' || errno == ERANGE ||
      e.value.find('-') != std::string::npos)
    parser.fail(e.line, "'" + e.key + "' must be a non-negative integer, got '" + e.value + "'");
  return v;
}

double parse_real(const Parser& parser, const Entry& e, const std::string& token) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(v))
    parser.fail(e.line, "'" + e.key + "' expects numbers, got '" + token + "'");
  return v;
}

std::vector<std::string> split_list(const std::string& value) {
  std::string normalized = value;
  std::replace(normalized.begin(), normalized.end(), ',', ' ');
  std::istringstream in(normalized);
  std::vector<std::string> tokens;
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

Eigen::VectorXd parse_real_list(const Parser& parser, const Entry& e) {
  const auto tokens = split_list(e.value);
  if (tokens.empty()) parser.fail(e.line, "'" + e.key + "' must not be empty");
  Eigen::VectorXd v(static_cast<int>(tokens.size()));
  for (std::size_t i = 0; i < tokens.size(); ++i) v[static_cast<int>(i)] = parse_real(parser, e, tokens[i]);
  return v;
}

std::vector<int> parse_int_list(const Parser& parser, const Entry& e) {
  const auto tokens = split_list(e.value);
  std::vector<int> v;
  for (const auto& tok : tokens) {
    errno = 0;
    char* end = nullptr;
    const long long x = std::strtoll(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0' || errno == ERANGE)
      parser.fail(e.line, "'" + e.key + "' expects integers, got '" + tok + "'");
    v.push_back(static_cast<int>(x));
  }
  return v;
}

std::string format_tmp(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void check_probability_vector(const Parser& parser, const Entry& e, const Eigen::VectorXd& v,
                              int k) {
  if (v.size() != k)
    parser.fail(e.line, "'" + e.key + "' needs " + std::to_string(k) + " entries, got " +
                            std::to_string(v.size()));
  for (int i = 0; i < v.size(); ++i) {
    if (v[i] < 0.0)
      parser.fail(e.line, "'" + e.key + "' entries must be non-negative probabilities");
  }
  if (std::abs(v.sum() - 1.0) > Distribution::kNormTol)
    parser.fail(e.line, "'" + e.key + "' must sum to 1 within 1e-9, sums to " +
                            format_tmp(v.sum()));
}

Strategy parse_strategy(const Parser& parser, const Entry& e) {
  try {
    return strategy_from_string(e.value);
  } catch (const std::invalid_argument& ex) {
    parser.fail(e.line, ex.what());
  }
}

void parse_world(Parser& parser, ExperimentConfig& cfg) {
  const Entry& k_entry = parser.require("world", "k");
  const long long k = parse_int(parser, k_entry);
  if (k < 2 || k > 1024) parser.fail(k_entry.line, "'k' must be an integer in [2, 1024]");
  cfg.k = static_cast<int>(k);

  const Entry& py = parser.require("world", "p_y");
  cfg.truth_prior = parse_real_list(parser, py);
  check_probability_vector(parser, py, cfg.truth_prior, cfg.k);

  const Entry& pu = parser.require("world", "p_u");
  cfg.prejudice_prior = parse_real_list(parser, pu);
  check_probability_vector(parser, pu, cfg.prejudice_prior, cfg.k);

  Entry* signal = parser.find("world", "signal");
  std::vector<Entry*> rows;
  for (int y = 0; y < cfg.k; ++y) {
    if (Entry* row = parser.find("world", "p_i_row_" + std::to_string(y)))
      rows.push_back(row);
  }
  if (signal && !rows.empty())
    parser.fail(signal->line, "give either 'signal' or explicit p_i_row_* rows, not both");
  if (signal) {
    const auto tokens = split_list(signal->value);
    if (tokens.size() == 1 && tokens[0] == "identity") {
      cfg.signal_rows = Eigen::MatrixXd::Identity(cfg.k, cfg.k);
    } else if (tokens.size() == 2 && tokens[0] == "noisy") {
      const double flip = parse_real(parser, *signal, tokens[1]);
      if (flip < 0.0 || flip > 1.0)
        parser.fail(signal->line, "'signal = noisy FLIP' needs FLIP in [0, 1]");
      cfg.signal_rows = ConditionalTable::symmetric_noise(cfg.k, flip).rows();
    } else {
      parser.fail(signal->line, "'signal' must be 'identity' or 'noisy FLIP'");
    }
  } else {
    if (static_cast<int>(rows.size()) != cfg.k)
      parser.fail(parser.require("world", "k").line,
                  "world needs 'signal' or all rows p_i_row_0 .. p_i_row_" +
                      std::to_string(cfg.k - 1));
    cfg.signal_rows.resize(cfg.k, cfg.k);
    for (int y = 0; y < cfg.k; ++y) {
      const Eigen::VectorXd row = parse_real_list(parser, *rows[y]);
      check_probability_vector(parser, *rows[y], row, cfg.k);
      cfg.signal_rows.row(y) = row.transpose();
    }
  }
}

void parse_roster(Parser& parser, ExperimentConfig& cfg) {
  const Entry& n = parser.require("roster", "n_agents");
  const long long v = parse_int(parser, n);
  if (v < 1 || v > 100000) parser.fail(n.line, "'n_agents' must be a positive integer");
  cfg.n_agents = static_cast<int>(v);

  Entry* informed = parser.find("roster", "informed");
  Entry* fraction = parser.find("roster", "informed_fraction");
  if (informed && fraction)
    parser.fail(fraction->line, "give either 'informed' or 'informed_fraction', not both");
  if (informed) {
    cfg.informed = parse_int_list(parser, *informed);
    for (int a : cfg.informed) {
      if (a < 0 || a >= cfg.n_agents)
        parser.fail(informed->line, "informed index " + std::to_string(a) + " out of range");
    }
    std::sort(cfg.informed.begin(), cfg.informed.end());
    cfg.informed.erase(std::unique(cfg.informed.begin(), cfg.informed.end()),
                       cfg.informed.end());
  } else if (fraction) {
    const double f = parse_real(parser, *fraction, fraction->value);
    if (f < 0.0 || f > 1.0)
      parser.fail(fraction->line, "'informed_fraction' must lie in [0, 1]");
    const int count = static_cast<int>(std::llround(f * cfg.n_agents));
    cfg.informed.clear();
    for (int a = 0; a < count; ++a) cfg.informed.push_back(a);
  }
}

void parse_assignment(Parser& parser, ExperimentConfig& cfg) {
  const Entry& n = parser.require("assignment", "n_items");
  const long long v = parse_int(parser, n);
  if (v < 1 || v > 10000000) parser.fail(n.line, "'n_items' must be a positive integer");
  cfg.n_items = static_cast<int>(v);

  if (Entry* lpp = parser.find("assignment", "labels_per_item")) {
    if (lpp->value == "complete") {
      cfg.labels_per_item = 0;
    } else {
      const long long x = parse_int(parser, *lpp);
      if (x < 1 || x > cfg.n_agents)
        parser.fail(lpp->line, "'labels_per_item' must be 'complete' or in [1, n_agents]");
      cfg.labels_per_item = static_cast<int>(x);
    }
  }
}

void parse_game(Parser& parser, ExperimentConfig& cfg) {
  if (Entry* mode = parser.find("game", "prejudice_mode")) {
    try {
      cfg.prejudice_mode = prejudice_mode_from_string(mode->value);
    } catch (const std::invalid_argument& ex) {
      parser.fail(mode->line, ex.what());
    }
  }
}

void parse_profile(Parser& parser, ExperimentConfig& cfg) {
  if (Entry* informed = parser.find("profile", "informed"))
    cfg.informed_strategy = parse_strategy(parser, *informed);
  if (Entry* uninformed = parser.find("profile", "uninformed")) {
    cfg.uninformed_strategy = parse_strategy(parser, *uninformed);
    if (cfg.uninformed_strategy == Strategy::Truthful)
      parser.fail(uninformed->line, "uninformed agents cannot play truthful");
  }
  if (auto* section = parser.section("profile")) {
    for (auto& e : section->entries) {
      if (e.key.rfind("agent_", 0) != 0) continue;
      e.used = true;
      errno = 0;
      char* end = nullptr;
      const long long idx = std::strtoll(e.key.c_str() + 6, &end, 10);
      if (end == e.key.c_str() + 6 || *end != '\0' || idx < 0 || idx >= cfg.n_agents)
        parser.fail(e.line, "override key '" + e.key + "' must name an agent in range");
      const Strategy s = parse_strategy(parser, e);
      const bool is_informed =
          std::binary_search(cfg.informed.begin(), cfg.informed.end(), static_cast<int>(idx));
      if (s == Strategy::Truthful && !is_informed)
        parser.fail(e.line, "uninformed agent " + std::to_string(idx) + " cannot play truthful");
      cfg.strategy_overrides[static_cast<int>(idx)] = s;
    }
  }
}

void parse_mechanism(Parser& parser, ExperimentConfig& cfg) {
  if (Entry* name = parser.find("mechanism", "name")) {
    static const std::vector<std::string> known = {"agreement", "pairwise_agreement",
                                                   "gold_seeded", "prejudice_anchored"};
    if (std::find(known.begin(), known.end(), name->value) == known.end())
      parser.fail(name->line, "unknown mechanism '" + name->value +
                                  "' (expected agreement | pairwise_agreement | "
                                  "gold_seeded | prejudice_anchored)");
    cfg.mechanism = name->value;
  }
  auto real_param = [&](const char* key, double* slot, double lo, double hi) {
    if (Entry* e = parser.find("mechanism", key)) {
      const double v = parse_real(parser, *e, e->value);
      if (v < lo || v > hi)
        parser.fail(e->line, std::string("'") + key + "' must lie in [" + format_tmp(lo) +
                                 ", " + format_tmp(hi) + "]");
      *slot = v;
    }
  };
  real_param("threshold", &cfg.threshold, 0.0, 1.0);
  real_param("accuracy_cut", &cfg.accuracy_cut, 0.0, 1.0);
  real_param("agree_cut", &cfg.agree_cut, 0.0, 1.0);
  real_param("match_cut", &cfg.match_cut, 0.0, 1.0);
  auto int_param = [&](const char* key, int* slot, long long lo, long long hi) {
    if (Entry* e = parser.find("mechanism", key)) {
      const long long v = parse_int(parser, *e);
      if (v < lo || v > hi)
        parser.fail(e->line, std::string("'") + key + "' out of range");
      *slot = static_cast<int>(v);
    }
  };
  int_param("gold_items", &cfg.gold_items, 0, 10000000);
  int_param("anchored_items", &cfg.anchored_items, 0, 10000000);
  int_param("max_rounds", &cfg.max_rounds, 0, 1000000);
}

void parse_run(Parser& parser, ExperimentConfig& cfg) {
  if (Entry* trials = parser.find("run", "trials")) {
    const long long v = parse_int(parser, *trials);
    if (v < 1) parser.fail(trials->line, "'trials' must be >= 1");
    cfg.trials = v;
  }
  if (Entry* seed = parser.find("run", "seed")) cfg.seed = parse_u64(parser, *seed);
  if (Entry* out = parser.find("run", "out")) cfg.out = out->value;
  if (Entry* grid = parser.find("run", "items_grid")) {
    cfg.items_grid = parse_int_list(parser, *grid);
    for (int n : cfg.items_grid) {
      if (n < 1) parser.fail(grid->line, "'items_grid' entries must be >= 1");
    }
  }
  if (Entry* eps = parser.find("run", "epsilon")) {
    const double v = parse_real(parser, *eps, eps->value);
    if (v <= 0.0 || v > 1.0) parser.fail(eps->line, "'epsilon' must lie in (0, 1]");
    cfg.epsilon = v;
  }
}

void parse_sweep(Parser& parser, ExperimentConfig& cfg) {
  for (Entry* prior : parser.find_all("sweep", "prior")) {
    const Eigen::VectorXd v = parse_real_list(parser, *prior);
    check_probability_vector(parser, *prior, v, cfg.k);
    cfg.sweep_prejudice_priors.push_back(v);
  }
  if (Entry* steps = parser.find("sweep", "dynamics_steps")) {
    const long long v = parse_int(parser, *steps);
    if (v < 0) parser.fail(steps->line, "'dynamics_steps' must be >= 0");
    cfg.dynamics_steps = static_cast<int>(v);
  }
  if (Entry* restarts = parser.find("sweep", "restarts")) {
    const long long v = parse_int(parser, *restarts);
    if (v < 1) parser.fail(restarts->line, "'restarts' must be >= 1");
    cfg.restarts = static_cast<int>(v);
  }
  if (Entry* trials = parser.find("sweep", "dynamics_trials")) {
    const long long v = parse_int(parser, *trials);
    if (v < 1) parser.fail(trials->line, "'dynamics_trials' must be >= 1");
    cfg.dynamics_trials = static_cast<int>(v);
  }
  if (Entry* margin = parser.find("sweep", "switch_margin")) {
    const double v = parse_real(parser, *margin, margin->value);
    if (v < 0.0 || v > 1.0) parser.fail(margin->line, "'switch_margin' must lie in [0, 1]");
    cfg.switch_margin = v;
  }
}

}  // namespace

bool ExperimentConfig::operator==(const ExperimentConfig& other) const {
  return k == other.k && truth_prior == other.truth_prior &&
         prejudice_prior == other.prejudice_prior && signal_rows == other.signal_rows &&
         n_agents == other.n_agents && informed == other.informed &&
         n_items == other.n_items && labels_per_item == other.labels_per_item &&
         prejudice_mode == other.prejudice_mode &&
         informed_strategy == other.informed_strategy &&
         uninformed_strategy == other.uninformed_strategy &&
         strategy_overrides == other.strategy_overrides && mechanism == other.mechanism &&
         threshold == other.threshold && accuracy_cut == other.accuracy_cut &&
         agree_cut == other.agree_cut && match_cut == other.match_cut &&
         gold_items == other.gold_items && anchored_items == other.anchored_items &&
         max_rounds == other.max_rounds && trials == other.trials && seed == other.seed &&
         out == other.out && items_grid == other.items_grid && epsilon == other.epsilon &&
         sweep_prejudice_priors == other.sweep_prejudice_priors &&
         dynamics_steps == other.dynamics_steps && restarts == other.restarts &&
         dynamics_trials == other.dynamics_trials && switch_margin == other.switch_margin;
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& source_name) {
  Parser parser(text, source_name);
  ExperimentConfig cfg;
  parse_world(parser, cfg);
  parse_roster(parser, cfg);
  parse_assignment(parser, cfg);
  parse_game(parser, cfg);
  parse_profile(parser, cfg);
  parse_mechanism(parser, cfg);
  parse_run(parser, cfg);
  parse_sweep(parser, cfg);
  parser.reject_unused(
      {"world", "roster", "assignment", "game", "profile", "mechanism", "run", "sweep"});
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open config file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

namespace {

std::string format_exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string join_reals(const Eigen::VectorXd& v) {
  std::string s;
  for (int i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_exact(v[i]);
  }
  return s;
}

}  // namespace

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "# crowdgame experiment configuration\n";
  os << "[world]\n";
  os << "k = " << cfg.k << "\n";
  os << "p_y = " << join_reals(cfg.truth_prior) << "\n";
  os << "p_u = " << join_reals(cfg.prejudice_prior) << "\n";
  for (int y = 0; y < cfg.k; ++y)
    os << "p_i_row_" << y << " = " << join_reals(cfg.signal_rows.row(y).transpose()) << "\n";

  os << "\n[roster]\n";
  os << "n_agents = " << cfg.n_agents << "\n";
  if (!cfg.informed.empty()) {
    os << "informed = ";
    for (std::size_t i = 0; i < cfg.informed.size(); ++i) {
      if (i) os << ", ";
      os << cfg.informed[i];
    }
    os << "\n";
  }

  os << "\n[assignment]\n";
  os << "n_items = " << cfg.n_items << "\n";
  if (cfg.labels_per_item == 0)
    os << "labels_per_item = complete\n";
  else
    os << "labels_per_item = " << cfg.labels_per_item << "\n";

  os << "\n[game]\n";
  os << "prejudice_mode = " << to_string(cfg.prejudice_mode) << "\n";

  os << "\n[profile]\n";
  os << "informed = " << to_string(cfg.informed_strategy) << "\n";
  os << "uninformed = " << to_string(cfg.uninformed_strategy) << "\n";
  for (const auto& [agent, strategy] : cfg.strategy_overrides)
    os << "agent_" << agent << " = " << to_string(strategy) << "\n";

  os << "\n[mechanism]\n";
  os << "name = " << cfg.mechanism << "\n";
  os << "threshold = " << format_exact(cfg.threshold) << "\n";
  os << "accuracy_cut = " << format_exact(cfg.accuracy_cut) << "\n";
  os << "agree_cut = " << format_exact(cfg.agree_cut) << "\n";
  os << "match_cut = " << format_exact(cfg.match_cut) << "\n";
  os << "gold_items = " << cfg.gold_items << "\n";
  os << "anchored_items = " << cfg.anchored_items << "\n";
  os << "max_rounds = " << cfg.max_rounds << "\n";

  os << "\n[run]\n";
  os << "trials = " << cfg.trials << "\n";
  os << "seed = " << cfg.seed << "\n";
  if (!cfg.out.empty()) os << "out = " << cfg.out << "\n";
  if (!cfg.items_grid.empty()) {
    os << "items_grid = ";
    for (std::size_t i = 0; i < cfg.items_grid.size(); ++i) {
      if (i) os << ", ";
      os << cfg.items_grid[i];
    }
    os << "\n";
  }
  os << "epsilon = " << format_exact(cfg.epsilon) << "\n";

  os << "\n[sweep]\n";
  for (const auto& prior : cfg.sweep_prejudice_priors)
    os << "prior = " << join_reals(prior) << "\n";
  os << "dynamics_steps = " << cfg.dynamics_steps << "\n";
  os << "restarts = " << cfg.restarts << "\n";
  os << "dynamics_trials = " << cfg.dynamics_trials << "\n";
  os << "switch_margin = " << format_exact(cfg.switch_margin) << "\n";
  return os.str();
}

WorldDistribution build_world(const ExperimentConfig& cfg) {
  return WorldDistribution(LabelSpace(cfg.k), Distribution(cfg.truth_prior),
                           Distribution(cfg.prejudice_prior),
                           ConditionalTable(cfg.signal_rows));
}

AgentRoster build_roster(const ExperimentConfig& cfg) {
  return AgentRoster(cfg.n_agents, cfg.informed);
}

Assignment build_assignment(const ExperimentConfig& cfg, int n_items, rng::Stream& stream) {
  if (cfg.labels_per_item == 0) return Assignment::complete(cfg.n_agents, n_items);
  return make_assignment(cfg.n_agents, n_items, cfg.labels_per_item, stream);
}

StrategyProfile build_profile(const ExperimentConfig& cfg, const AgentRoster& roster) {
  StrategyProfile profile =
      StrategyProfile::symmetric(roster, cfg.informed_strategy, cfg.uninformed_strategy);
  for (const auto& [agent, strategy] : cfg.strategy_overrides)
    profile = profile.with_agent(agent, strategy);
  profile.validate_for(roster);
  return profile;
}

MechanismHandle build_mechanism(const ExperimentConfig& cfg) {
  if (cfg.mechanism == "agreement") return make_agreement_handle(cfg.threshold);
  if (cfg.mechanism == "pairwise_agreement")
    return make_pairwise_agreement_handle(cfg.threshold);
  if (cfg.mechanism == "gold_seeded")
    return make_gold_seeded_handle(cfg.gold_items, cfg.accuracy_cut, cfg.agree_cut,
                                   cfg.max_rounds);
  if (cfg.mechanism == "prejudice_anchored")
    return make_prejudice_anchored_handle(cfg.anchored_items, cfg.match_cut, cfg.agree_cut,
                                          cfg.max_rounds);
  throw std::invalid_argument("unknown mechanism '" + cfg.mechanism + "'");
}

GameConfig build_game_config(const ExperimentConfig& cfg, rng::Stream assignment_stream) {
  return GameConfig(build_world(cfg), build_roster(cfg),
                    build_assignment(cfg, cfg.n_items, assignment_stream),
                    cfg.prejudice_mode);
}

}  // namespace crowdgame
