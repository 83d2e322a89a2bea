#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "crowdgame/config.hpp"
#include "crowdgame/csv.hpp"
#include "crowdgame/harness.hpp"
#include "crowdgame/stats.hpp"

using namespace crowdgame;

namespace {

const char* kBaseConfig = R"cfg(
[world]
k = 2
p_y = 0.5, 0.5
p_u = 0.9, 0.1
signal = identity

[roster]
n_agents = 5
informed = 0, 1, 2

[assignment]
n_items = 12
labels_per_item = complete

[game]
prejudice_mode = shared

[profile]
informed = truthful
uninformed = randomise

[mechanism]
name = agreement
threshold = 0.8

[run]
trials = 40
seed = 3
)cfg";

// Scratch config file removed on scope exit.
class TempConfig {
 public:
  explicit TempConfig(const std::string& text) {
    static int counter = 0;
    path_ = (std::filesystem::temp_directory_path() /
             ("crowdgame_cfg_" + std::to_string(counter++) + ".cfg"))
                .string();
    std::ofstream f(path_);
    f << text;
  }
  ~TempConfig() { std::filesystem::remove(path_); }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

int config_error_line(const std::string& text) {
  try {
    parse_config_text(text, "test");
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("shipped scenario configs parse and build") {
  const std::string dir = CROWDGAME_CONFIG_DIR;
  for (const char* name : {"truthful_majority.cfg", "all_prejudice.cfg",
                           "all_randomise.cfg", "impossibility_pair.cfg",
                           "gold_repair.cfg", "entropy_sweep.cfg"}) {
    const ExperimentConfig cfg = parse_config_file(dir + "/" + name);
    CHECK(validate_world(build_world(cfg)).all_passed());
    rng::Stream stream(cfg.seed);
    const GameConfig game_cfg = build_game_config(cfg, stream);
    CHECK_NOTHROW(build_profile(cfg, game_cfg.roster).validate_for(game_cfg.roster));
    CHECK_NOTHROW(build_mechanism(cfg));
  }
}

TEST_CASE("config parse errors are line-anchored") {
  CHECK(config_error_line("[world]\nk = 2\np_y = 0.5, -0.5\np_u = 0.9, 0.1\n"
                          "signal = identity\n[roster]\nn_agents = 2\n"
                          "[assignment]\nn_items = 1\n") == 3);
  CHECK(config_error_line("[world]\nk = 2\np_y = 0.6, 0.6\np_u = 0.9, 0.1\n"
                          "signal = identity\n[roster]\nn_agents = 2\n"
                          "[assignment]\nn_items = 1\n") == 3);
  CHECK(config_error_line("[world]\nk = two\n") == 2);
  CHECK(config_error_line("key_outside_section = 1\n") == 1);
  CHECK(config_error_line("[world]\nk = 2\np_y = 0.5 0.5\np_u = 0.9 0.1\n"
                          "signal = identity\nbogus = 1\n[roster]\nn_agents = 2\n"
                          "[assignment]\nn_items = 1\n") == 6);

  const std::string duplicated =
      "[world]\nk = 2\np_y = 0.5 0.5\np_y = 0.5 0.5\np_u = 0.9 0.1\n"
      "signal = identity\n[roster]\nn_agents = 2\n[assignment]\nn_items = 1\n";
  CHECK(config_error_line(duplicated) == 4);

  const std::string bad_override =
      std::string(kBaseConfig) + "[profile]\nagent_4 = truthful\n";
  CHECK_THROWS_AS(parse_config_text(bad_override, "test"), ConfigError);

  const std::string informed_out_of_range =
      "[world]\nk = 2\np_y = 0.5 0.5\np_u = 0.9 0.1\nsignal = identity\n"
      "[roster]\nn_agents = 2\ninformed = 7\n[assignment]\nn_items = 1\n";
  CHECK(config_error_line(informed_out_of_range) == 8);
}

TEST_CASE("config round-trips through its canonical form") {
  ExperimentConfig cfg = parse_config_text(kBaseConfig, "base");
  cfg.strategy_overrides[1] = Strategy::Prejudiced;
  cfg.items_grid = {5, 10, 20, 40};
  cfg.out = "result.csv";
  cfg.labels_per_item = 2;
  cfg.mechanism = "gold_seeded";
  cfg.gold_items = 4;
  cfg.prejudice_mode = PrejudiceMode::IID;
  Eigen::VectorXd p(2);
  p << 0.75, 0.25;
  cfg.sweep_prejudice_priors = {p};
  cfg.epsilon = 0.01;
  cfg.switch_margin = 0.015;

  const std::string text = serialize_config(cfg);
  const ExperimentConfig reparsed = parse_config_text(text, "roundtrip");
  CHECK(reparsed == cfg);
  // a second pass stays fixed
  CHECK(serialize_config(reparsed) == text);
}

TEST_CASE("informed_fraction canonicalizes to explicit indices") {
  const std::string text =
      "[world]\nk = 2\np_y = 0.5 0.5\np_u = 0.9 0.1\nsignal = identity\n"
      "[roster]\nn_agents = 10\ninformed_fraction = 0.6\n[assignment]\nn_items = 3\n";
  const ExperimentConfig cfg = parse_config_text(text, "fraction");
  CHECK(cfg.informed == std::vector<int>{0, 1, 2, 3, 4, 5});
  const ExperimentConfig reparsed = parse_config_text(serialize_config(cfg), "again");
  CHECK(reparsed.informed == cfg.informed);
}

TEST_CASE("noisy signal sugar expands to a symmetric channel") {
  const std::string text =
      "[world]\nk = 3\np_y = 0.2 0.3 0.5\np_u = 0.8 0.1 0.1\nsignal = noisy 0.2\n"
      "[roster]\nn_agents = 2\n[assignment]\nn_items = 1\n";
  const ExperimentConfig cfg = parse_config_text(text, "noisy");
  CHECK(cfg.signal_rows(0, 0) == doctest::Approx(0.8));
  CHECK(cfg.signal_rows(0, 1) == doctest::Approx(0.1));
  CHECK(cfg.signal_rows(2, 2) == doctest::Approx(0.8));
}

TEST_CASE("regularized incomplete gamma matches reference values") {
  using stats::regularized_gamma_p;
  using stats::regularized_gamma_q;
  CHECK(regularized_gamma_p(0.5, 0.5) == doctest::Approx(0.6826894921370859).epsilon(1e-10));
  CHECK(regularized_gamma_q(0.5, 0.5) == doctest::Approx(0.31731050786291115).epsilon(1e-10));
  CHECK(regularized_gamma_p(2.5, 1.0) == doctest::Approx(0.15085496391539038).epsilon(1e-10));
  CHECK(regularized_gamma_q(2.5, 1.0) == doctest::Approx(0.8491450360846096).epsilon(1e-10));
  CHECK(regularized_gamma_p(10.0, 12.3) == doctest::Approx(0.782835494614037).epsilon(1e-10));
  CHECK(regularized_gamma_p(1.0, 1.0) == doctest::Approx(0.6321205588285577).epsilon(1e-10));
  CHECK(regularized_gamma_p(3.0, 0.0) == 0.0);
  CHECK(regularized_gamma_q(3.0, 0.0) == 1.0);
  CHECK_THROWS_AS(regularized_gamma_p(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("chi-square survival function matches reference values") {
  using stats::chi_square_sf;
  CHECK(chi_square_sf(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-8));
  CHECK(chi_square_sf(1.0, 1) == doctest::Approx(0.31731050786291115).epsilon(1e-10));
  CHECK(chi_square_sf(0.0, 1) == 1.0);
  CHECK(chi_square_sf(10.0, 4) == doctest::Approx(0.04042768199451279).epsilon(1e-10));
  CHECK(chi_square_sf(2.5, 2) == doctest::Approx(0.2865047968601901).epsilon(1e-10));
  CHECK(chi_square_sf(27.2, 13) == doctest::Approx(0.011679340271505877).epsilon(1e-10));
  CHECK(chi_square_sf(0.5, 5) == doctest::Approx(0.9921232932326296).epsilon(1e-10));
}

TEST_CASE("chi-square homogeneity behaves at the extremes") {
  using stats::chi_square_homogeneity;
  const auto same = chi_square_homogeneity({500, 500}, {500, 500});
  CHECK(same.statistic == doctest::Approx(0.0));
  CHECK(same.p_value == doctest::Approx(1.0));

  const auto disjoint = chi_square_homogeneity({1000, 0}, {0, 1000});
  CHECK(disjoint.p_value < 1e-12);

  const auto vacuous = chi_square_homogeneity({10, 0}, {12, 0});
  CHECK(vacuous.p_value == 1.0);
  CHECK(chi_square_homogeneity({}, {}).p_value == 1.0);
  CHECK_THROWS_AS(chi_square_homogeneity({1, 2}, {1}), std::invalid_argument);
}

TEST_CASE("csv output carries the version line and empty cells") {
  std::ostringstream os;
  CsvWriter csv(os, {"a", "b", "c"});
  csv.row({1ll, std::monostate{}, 0.5});
  csv.row({std::string("x"), 2.0, std::monostate{}});
  CHECK(os.str() == "# crowdgame-csv v1\na,b,c\n1,,0.5\nx,2,\n");
  CHECK_THROWS_AS(csv.row({1ll}), std::logic_error);
  CHECK(format_double(0.1234567890123) == "0.123456789");
  CHECK(cell(std::nullopt) == CsvCell{std::monostate{}});
}

TEST_CASE("run_validate maps constraint failures to exit codes") {
  SUBCASE("valid world passes") {
    TempConfig cfg(kBaseConfig);
    std::ostringstream out, err;
    CHECK(run_validate(cfg.path(), out, err) == 0);
    CHECK(out.str().find("[PASS] signal_informative") != std::string::npos);
    CHECK(out.str().find("result: PASS") != std::string::npos);
  }

  SUBCASE("matching priors fail the distinct-priors constraint") {
    std::string text = kBaseConfig;
    const auto pos = text.find("p_u = 0.9, 0.1");
    text.replace(pos, 14, "p_u = 0.5, 0.5");
    TempConfig cfg(text);
    std::ostringstream out, err;
    CHECK(run_validate(cfg.path(), out, err) == 1);
    CHECK(out.str().find("[FAIL] distinct_priors") != std::string::npos);
    CHECK(out.str().find("P(Y)") != std::string::npos);
  }

  SUBCASE("negative probabilities are a parse error") {
    std::string text = kBaseConfig;
    const auto pos = text.find("p_y = 0.5, 0.5");
    text.replace(pos, 14, "p_y = 0.6, -0.1");
    TempConfig cfg(text);
    std::ostringstream out, err;
    CHECK(run_validate(cfg.path(), out, err) == 2);
    // kBaseConfig opens with a blank line, so p_y sits on line 4
    CHECK(err.str().find(":4:") != std::string::npos);
  }

  SUBCASE("missing file is a usage error") {
    std::ostringstream out, err;
    CHECK(run_validate("/nonexistent/nowhere.cfg", out, err) == 2);
  }
}

TEST_CASE("run_simulate emits a deterministic csv") {
  TempConfig cfg(kBaseConfig);
  CommonOverrides overrides;
  std::ostringstream out1, out2, err;
  CHECK(run_simulate(cfg.path(), overrides, out1, err) == 0);
  CHECK(run_simulate(cfg.path(), overrides, out2, err) == 0);
  CHECK(out1.str() == out2.str());
  CHECK(out1.str().rfind("# crowdgame-csv v1\n", 0) == 0);
  CHECK(out1.str().find("n_items,p_ii_hat,p_uu_hat,odds_ratio_ii,odds_ratio_uu,"
                        "trials,seed\n") != std::string::npos);

  // a different seed changes the numbers
  CommonOverrides reseeded;
  reseeded.seed = 12345;
  std::ostringstream out3;
  CHECK(run_simulate(cfg.path(), reseeded, out3, err) == 0);
  CHECK(out3.str() != out1.str());
}

TEST_CASE("run_simulate leaves undefined estimates empty") {
  // all agents informed and truthful: the complement estimate has no samples
  std::string text = kBaseConfig;
  const auto pos = text.find("informed = 0, 1, 2");
  text.replace(pos, 18, "informed = 0, 1, 2, 3, 4");
  TempConfig cfg(text);
  std::ostringstream out, err;
  CHECK(run_simulate(cfg.path(), CommonOverrides{}, out, err) == 0);
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);  // version
  std::getline(lines, line);  // header
  std::getline(lines, line);  // the single data row
  // p_uu_hat and odds_ratio_uu are empty: ",," after the p_ii column
  CHECK(line.find(",,") != std::string::npos);
  CHECK(line.back() != ',');  // trailing fields (trials, seed) still present
}

TEST_CASE("run_impossibility refuses anchored mechanisms with a domain error") {
  ImpossibilityOptions options;
  options.mechanism = "gold_seeded";
  std::ostringstream out, err;
  CHECK(run_impossibility(options, CommonOverrides{}, out, err) == 1);
  CHECK(err.str().find("anchor") != std::string::npos);
}

TEST_CASE("run_impossibility defaults run the paired demo") {
  ImpossibilityOptions options;
  CommonOverrides overrides;
  overrides.trials = 60;
  std::ostringstream out, err;
  CHECK(run_impossibility(options, overrides, out, err) == 0);
  CHECK(out.str().find("success_rate_scenario1") != std::string::npos);
}

TEST_CASE("run_gold_sweep guards its preconditions") {
  SUBCASE("non-gold mechanism is rejected") {
    TempConfig cfg(kBaseConfig);
    GoldSweepOptions options;
    options.gold_grid = {2};
    std::ostringstream out, err;
    CHECK(run_gold_sweep(cfg.path(), options, CommonOverrides{}, out, err) == 2);
  }

  SUBCASE("gold size zero is rejected") {
    std::string text = kBaseConfig;
    const auto pos = text.find("name = agreement");
    text.replace(pos, 16, "name = gold_seeded");
    TempConfig cfg(text);
    GoldSweepOptions options;
    options.gold_grid = {0};
    std::ostringstream out, err;
    CHECK(run_gold_sweep(cfg.path(), options, CommonOverrides{}, out, err) == 2);
  }

  SUBCASE("a valid sweep emits one row per gold size") {
    std::string text = kBaseConfig;
    const auto pos = text.find("name = agreement");
    text.replace(pos, 16, "name = gold_seeded");
    TempConfig cfg(text);
    GoldSweepOptions options;
    options.gold_grid = {2, 4};
    CommonOverrides overrides;
    overrides.trials = 30;
    std::ostringstream out, err;
    CHECK(run_gold_sweep(cfg.path(), options, overrides, out, err) == 0);
    int rows = 0;
    std::istringstream lines(out.str());
    std::string line;
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == 4);  // version + header + two sweep rows
  }
}

TEST_CASE("run_entropy_sweep validates swept priors") {
  std::string text = kBaseConfig;
  TempConfig cfg(text);

  SUBCASE("no priors anywhere is a usage error") {
    std::ostringstream out, err;
    CHECK(run_entropy_sweep(cfg.path(), EntropySweepOptions{}, CommonOverrides{}, out,
                            err) == 2);
  }

  SUBCASE("a prior equal to the truth prior is a constraint failure") {
    EntropySweepOptions options;
    Eigen::VectorXd same(2);
    same << 0.5, 0.5;
    options.prejudice_priors = {same};
    std::ostringstream out, err;
    CHECK(run_entropy_sweep(cfg.path(), options, CommonOverrides{}, out, err) == 1);
    CHECK(err.str().find("distinct_priors") != std::string::npos);
  }

  SUBCASE("steps zero reports initial-profile frequencies deterministically") {
    EntropySweepOptions options;
    Eigen::VectorXd prior(2);
    prior << 0.9, 0.1;
    options.prejudice_priors = {prior};
    options.dynamics_steps = 0;
    options.restarts = 40;
    std::ostringstream out1, out2, err;
    CHECK(run_entropy_sweep(cfg.path(), options, CommonOverrides{}, out1, err) == 0);
    CHECK(run_entropy_sweep(cfg.path(), options, CommonOverrides{}, out2, err) == 0);
    CHECK(out1.str() == out2.str());
    CHECK(out1.str().find("entropy_pu") != std::string::npos);
  }
}
