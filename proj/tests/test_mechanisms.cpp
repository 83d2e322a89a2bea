#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "crowdgame/mechanisms.hpp"
#include "oracles.hpp"

using namespace crowdgame;

namespace {

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

GameConfig config_identity(int n_agents, std::vector<int> informed, int n_items,
                           PrejudiceMode mode = PrejudiceMode::Shared, double py0 = 0.5,
                           double pu0 = 0.9) {
  return GameConfig(
      WorldDistribution(LabelSpace(2), Distribution(vec2(py0, 1 - py0)),
                        Distribution(vec2(pu0, 1 - pu0)), ConditionalTable::identity(2)),
      AgentRoster(n_agents, std::move(informed)), Assignment::complete(n_agents, n_items),
      mode);
}

bool is_subset(const std::vector<int>& inner, const std::vector<int>& outer) {
  return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

Eigen::MatrixXi random_reports(int n_agents, int n_items, int k, rng::Stream& stream) {
  Eigen::MatrixXi reports(n_agents, n_items);
  for (int a = 0; a < n_agents; ++a)
    for (int j = 0; j < n_items; ++j) reports(a, j) = stream.uniform_int(k);
  return reports;
}

// Test-only handles for the evaluation contract.
MechanismHandle always_all_handle() {
  return {"always_all", {},
          [](const Eigen::MatrixXi&, const Assignment& assignment, const GoldSet&,
             const std::map<int, int>&) {
            MechanismOutcome out;
            for (int a = 0; a < assignment.agent_count(); ++a) out.identified.push_back(a);
            return out;
          }};
}

MechanismHandle oracle_handle(std::vector<int> target) {
  return {"oracle", {},
          [target = std::move(target)](const Eigen::MatrixXi&, const Assignment&,
                                       const GoldSet&, const std::map<int, int>&) {
            MechanismOutcome out;
            out.identified = target;
            return out;
          }};
}

}  // namespace

TEST_CASE("agreement identifies a unanimous crowd") {
  const Assignment assignment = Assignment::complete(4, 6);
  const Eigen::MatrixXi reports = Eigen::MatrixXi::Constant(4, 6, 1);
  const MechanismOutcome out = agreement_mechanism(reports, assignment, 0.8);
  CHECK(out.identified == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("agreement rejects an empty report set") {
  const Assignment assignment = Assignment::complete(3, 2);
  const Eigen::MatrixXi empty = Eigen::MatrixXi::Constant(3, 2, -1);
  CHECK_THROWS_AS(agreement_mechanism(empty, assignment, 0.5), std::invalid_argument);
}

TEST_CASE("threshold zero identifies everyone regardless of reports") {
  rng::Stream stream(4);
  const Assignment assignment = Assignment::complete(5, 9);
  const Eigen::MatrixXi reports = random_reports(5, 9, 3, stream);
  const MechanismOutcome out = agreement_mechanism(reports, assignment, 0.0);
  CHECK(out.identified.size() == 5);
}

TEST_CASE("agreement excludes a lone randomiser among truthful reporters") {
  // four agents echo the truth, one flips a fair coin; its score is
  // Binomial(100, 1/2)/100 against a 0.8 cut
  const double miss = oracles::binomial_tail_ge(100, 0.5, 80);
  CHECK(miss < 1e-8);

  const GameConfig cfg = config_identity(5, {0, 1, 2, 3}, 100);
  const StrategyProfile profile =
      StrategyProfile::symmetric(cfg.roster, Strategy::Truthful, Strategy::Randomise);
  rng::Stream stream(12);
  int excluded = 0;
  const int trials = 300;
  for (int t = 0; t < trials; ++t) {
    rng::Stream trial_stream = stream.fork(t);
    const ReportMatrix rm = generate_reports(cfg, profile, trial_stream);
    const MechanismOutcome out = agreement_mechanism(rm.reports(), cfg.assignment, 0.8);
    CHECK(is_subset({0, 1, 2, 3}, out.identified));
    excluded += !out.contains(4);
  }
  CHECK(static_cast<double>(excluded) / trials >= 0.99);
}

TEST_CASE("agreement ties break to the lowest label index") {
  // two vs two: consensus must be label 0
  const Assignment assignment = Assignment::complete(4, 1);
  Eigen::MatrixXi reports(4, 1);
  reports << 1, 1, 0, 0;
  const MechanismOutcome out = agreement_mechanism(reports, assignment, 0.5);
  CHECK(out.identified == std::vector<int>{2, 3});
}

TEST_CASE("agreement skips single-reporter items") {
  // item 1 has one reporter and must not contribute to any score
  const Assignment assignment(3, 2, {{0, 1, 2}, {0}});
  Eigen::MatrixXi reports(3, 2);
  reports << 1, 0, 1, -1, 1, -1;
  const MechanismOutcome out = agreement_mechanism(reports, assignment, 0.9);
  // agent 0 disagrees with nothing on item 1; its score is 1/1 from item 0
  CHECK(out.identified == std::vector<int>{0, 1, 2});
}

TEST_CASE("agents with no scoreable items are excluded at positive thresholds") {
  // both items have a single reporter, so neither agent has a scoreable item
  const Assignment lonely(2, 2, {{0}, {1}});
  Eigen::MatrixXi lonely_reports(2, 2);
  lonely_reports << 0, -1, -1, 1;
  const MechanismOutcome at_cut = agreement_mechanism(lonely_reports, lonely, 0.5);
  CHECK(at_cut.identified.empty());
  const MechanismOutcome vacuous = agreement_mechanism(lonely_reports, lonely, 0.0);
  CHECK(vacuous.identified.size() == 2);
}

TEST_CASE("agreement is label-permutation equivariant away from ties") {
  // odd reporter count with two labels: no consensus ties can occur
  rng::Stream stream(2718);
  const Assignment assignment = Assignment::complete(5, 12);
  for (int rep = 0; rep < 30; ++rep) {
    const Eigen::MatrixXi reports = random_reports(5, 12, 2, stream);
    Eigen::MatrixXi swapped = reports;
    for (int a = 0; a < 5; ++a)
      for (int j = 0; j < 12; ++j) swapped(a, j) = 1 - reports(a, j);
    const MechanismOutcome original = agreement_mechanism(reports, assignment, 0.7);
    const MechanismOutcome permuted = agreement_mechanism(swapped, assignment, 0.7);
    CHECK(original.identified == permuted.identified);
  }
}

TEST_CASE("raising the threshold never enlarges the identified set") {
  rng::Stream stream(33);
  const Assignment assignment = Assignment::complete(6, 15);
  for (int rep = 0; rep < 25; ++rep) {
    const Eigen::MatrixXi reports = random_reports(6, 15, 3, stream);
    const auto low = agreement_mechanism(reports, assignment, 0.4).identified;
    const auto mid = agreement_mechanism(reports, assignment, 0.7).identified;
    const auto high = agreement_mechanism(reports, assignment, 0.95).identified;
    CHECK(is_subset(mid, low));
    CHECK(is_subset(high, mid));

    const auto pw_low = pairwise_agreement_mechanism(reports, assignment, 0.4).identified;
    const auto pw_high = pairwise_agreement_mechanism(reports, assignment, 0.8).identified;
    CHECK(is_subset(pw_high, pw_low));
  }
}

TEST_CASE("mechanisms are pure functions of the report table") {
  rng::Stream stream(500);
  const Assignment assignment = Assignment::complete(5, 10);
  const Eigen::MatrixXi reports = random_reports(5, 10, 2, stream);
  for (int rep = 0; rep < 3; ++rep) {
    CHECK(agreement_mechanism(reports, assignment, 0.8).identified ==
          agreement_mechanism(reports, assignment, 0.8).identified);
    CHECK(pairwise_agreement_mechanism(reports, assignment, 0.8).identified ==
          pairwise_agreement_mechanism(reports, assignment, 0.8).identified);
  }
}

TEST_CASE("pairwise agreement identifies a unanimous crowd") {
  const Assignment assignment = Assignment::complete(4, 5);
  const Eigen::MatrixXi reports = Eigen::MatrixXi::Constant(4, 5, 0);
  CHECK(pairwise_agreement_mechanism(reports, assignment, 0.99).identified.size() == 4);
}

TEST_CASE("gold seeding trusts accurate agents and rejects contradicting ones") {
  const Assignment assignment = Assignment::complete(3, 4);
  // truth on gold items 0 and 1 is label 1; agent 2 contradicts it everywhere
  Eigen::MatrixXi reports(3, 4);
  reports << 1, 1, 0, 0,
             1, 1, 1, 0,
             0, 0, 0, 0;
  GoldSet gold;
  gold.items[0] = 1;
  gold.items[1] = 1;
  const MechanismOutcome out = gold_seeded_mechanism(reports, assignment, gold, 0.8, 0.8);
  CHECK(out.identified == std::vector<int>{0, 1});
  CHECK(out.classified_in_round[0] == 0);
  CHECK(out.classified_in_round[2] == 0);
}

TEST_CASE("a coordinated prejudice contradicting the gold is rejected wholesale") {
  // shared prejudice play: everyone reports label 0, gold says label 1
  const Assignment assignment = Assignment::complete(4, 6);
  const Eigen::MatrixXi reports = Eigen::MatrixXi::Constant(4, 6, 0);
  GoldSet gold;
  for (int j = 0; j < 3; ++j) gold.items[j] = 1;
  const MechanismOutcome out = gold_seeded_mechanism(reports, assignment, gold, 0.8, 0.8);
  CHECK(out.identified.empty());
}

TEST_CASE("trust propagates to agents without gold items") {
  // agent 0 holds the only gold item and is accurate; agent 1 shares item 1
  // with agent 0 and agrees; agent 2 shares item 1 and disagrees
  const Assignment assignment(3, 2, {{0}, {0, 1, 2}});
  Eigen::MatrixXi reports(3, 2);
  reports << 1, 0,
             -1, 0,
             -1, 1;
  GoldSet gold;
  gold.items[0] = 1;
  const MechanismOutcome out = gold_seeded_mechanism(reports, assignment, gold, 0.8, 0.8);
  CHECK(out.identified == std::vector<int>{0, 1});
  CHECK(out.classified_in_round[0] == 0);
  CHECK(out.classified_in_round[1] == 1);
  CHECK(out.classified_in_round[2] == 1);
  CHECK(out.rounds == 1);
}

TEST_CASE("propagation walks a chain one round per agent") {
  const int n = 6;
  // agent i labels items {i-1, i}; everyone reports the same label
  std::vector<std::vector<int>> agents_of_item(n);
  for (int j = 0; j < n; ++j) {
    agents_of_item[j].push_back(j);
    if (j + 1 < n) agents_of_item[j].push_back(j + 1);
  }
  const Assignment assignment(n, n, std::move(agents_of_item));
  Eigen::MatrixXi reports = Eigen::MatrixXi::Constant(n, n, -1);
  for (int j = 0; j < n; ++j) {
    for (int a : assignment.agents_of_item(j)) reports(a, j) = 1;
  }
  GoldSet gold;
  gold.items[0] = 1;
  const MechanismOutcome out = gold_seeded_mechanism(reports, assignment, gold, 0.8, 0.8);
  CHECK(static_cast<int>(out.identified.size()) == n);
  CHECK(out.rounds == n - 2);  // agents 0 and 1 hold gold; the rest chain
  for (int a = 2; a < n; ++a) CHECK(out.classified_in_round[a] == a - 1);
  CHECK(out.rounds <= n);
}

TEST_CASE("gold mechanism rejects an empty gold set") {
  const Assignment assignment = Assignment::complete(2, 2);
  const Eigen::MatrixXi reports = Eigen::MatrixXi::Constant(2, 2, 0);
  CHECK_THROWS_AS(gold_seeded_mechanism(reports, assignment, GoldSet{}, 0.8, 0.8),
                  std::invalid_argument);
}

TEST_CASE("prejudice anchoring rejects matchers and trusts dissenters") {
  const Assignment assignment = Assignment::complete(2, 4);
  // observed prejudice is label 0 on items 0 and 1; agent 0 matches it
  // everywhere, agent 1 never does
  Eigen::MatrixXi reports(2, 4);
  reports << 0, 0, 0, 0,
             1, 1, 1, 1;
  const std::map<int, int> obs{{0, 0}, {1, 0}};
  const MechanismOutcome out =
      prejudice_anchored_mechanism(reports, assignment, obs, 0.9, 0.8);
  CHECK(out.identified == std::vector<int>{1});
  CHECK_THROWS_AS(prejudice_anchored_mechanism(reports, assignment, {}, 0.9, 0.8),
                  std::invalid_argument);
}

TEST_CASE("randomisers survive prejudice anchoring at a 0.9 match cut") {
  // rejection needs >= 9 of 10 anchored matches at coin-flip odds
  const double per_agent = oracles::binomial_tail_ge(10, 0.5, 9);
  CHECK(per_agent == doctest::Approx(0.0107421875).epsilon(1e-12));

  const GameConfig cfg = config_identity(2, {}, 10, PrejudiceMode::Shared, 0.5, 0.9);
  const StrategyProfile profile =
      StrategyProfile::symmetric(cfg.roster, Strategy::Randomise, Strategy::Randomise);
  const MechanismHandle handle = make_prejudice_anchored_handle(10, 0.9, 0.8);
  rng::Stream stream(64);
  const int trials = 3000;
  int none_rejected = 0;
  long long agent_rejections = 0;
  for (int t = 0; t < trials; ++t) {
    rng::Stream trial_stream = stream.fork(t);
    const ReportMatrix rm = generate_reports(cfg, profile, trial_stream);
    const MechanismOutcome out = run_mechanism(handle, rm, cfg.assignment);
    none_rejected += out.identified.size() == 2;
    agent_rejections += 2 - static_cast<long long>(out.identified.size());
  }
  // union bound for two agents, plus Monte-Carlo slack
  const double bound = 1.0 - 2 * per_agent;
  CHECK(static_cast<double>(none_rejected) / trials >= bound - 0.02);
  const double per_agent_rate = static_cast<double>(agent_rejections) / (2.0 * trials);
  CHECK(std::abs(per_agent_rate - per_agent) <
        4 * std::sqrt(per_agent * (1 - per_agent) / (2.0 * trials)));
}

TEST_CASE("anchor extraction matches a manual gold set") {
  const GameConfig cfg = config_identity(4, {0, 1}, 8);
  const StrategyProfile profile =
      StrategyProfile::symmetric(cfg.roster, Strategy::Truthful, Strategy::Randomise);
  rng::Stream stream(21);
  const ReportMatrix rm = generate_reports(cfg, profile, stream);

  const MechanismHandle handle = make_gold_seeded_handle(3, 0.8, 0.8);
  const MechanismOutcome via_handle = run_mechanism(handle, rm, cfg.assignment);

  GoldSet manual;
  for (int j = 0; j < 3; ++j) manual.items[j] = rm.truth()[j];
  const MechanismOutcome direct =
      gold_seeded_mechanism(rm.reports(), cfg.assignment, manual, 0.8, 0.8);
  CHECK(via_handle.identified == direct.identified);
}

TEST_CASE("anchor extraction fails fast when the game cannot supply anchors") {
  const GameConfig iid = config_identity(3, {0}, 5, PrejudiceMode::IID);
  const StrategyProfile profile =
      StrategyProfile::symmetric(iid.roster, Strategy::Truthful, Strategy::Randomise);
  rng::Stream stream(2);
  const ReportMatrix rm = generate_reports(iid, profile, stream);
  CHECK_THROWS_AS(run_mechanism(make_prejudice_anchored_handle(2, 0.9, 0.8), rm, iid.assignment),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_mechanism(make_gold_seeded_handle(50, 0.8, 0.8), rm, iid.assignment),
                  std::invalid_argument);
}

TEST_CASE("evaluation of degenerate mechanisms") {
  const GameConfig cfg = config_identity(5, {0, 1, 2}, 6);
  const StrategyProfile profile =
      StrategyProfile::symmetric(cfg.roster, Strategy::Truthful, Strategy::Randomise);

  SUBCASE("a mechanism returning everyone") {
    const MechanismMetrics m =
        evaluate_mechanism(always_all_handle(), cfg, profile, 200, rng::Stream(1));
    CHECK(m.p_ii_hat == 1.0);
    CHECK(m.p_uu_hat == 0.0);
  }

  SUBCASE("an oracle returning exactly the truthful informed set") {
    const MechanismMetrics m = evaluate_mechanism(
        oracle_handle(truthful_informed_set(cfg.roster, profile)), cfg, profile, 200,
        rng::Stream(1));
    CHECK(m.p_ii_hat == 1.0);
    CHECK(m.p_uu_hat == 1.0);
  }

  SUBCASE("empty conditioning sets give undefined estimates") {
    const StrategyProfile all_prejudiced =
        StrategyProfile::symmetric(cfg.roster, Strategy::Prejudiced, Strategy::Prejudiced);
    const MechanismMetrics no_target = evaluate_mechanism(
        make_agreement_handle(0.8), cfg, all_prejudiced, 50, rng::Stream(1));
    CHECK_FALSE(no_target.p_ii_hat.has_value());
    CHECK(no_target.p_uu_hat.has_value());

    const GameConfig all_informed = config_identity(4, {0, 1, 2, 3}, 6);
    const StrategyProfile truthful = StrategyProfile::symmetric(
        all_informed.roster, Strategy::Truthful, Strategy::Randomise);
    const MechanismMetrics no_complement = evaluate_mechanism(
        make_agreement_handle(0.8), all_informed, truthful, 50, rng::Stream(1));
    CHECK(no_complement.p_ii_hat.has_value());
    CHECK_FALSE(no_complement.p_uu_hat.has_value());
  }
}

TEST_CASE("a truthful majority is identified and randomisers excluded") {
  const GameConfig cfg = config_identity(13, {0, 1, 2, 3, 4, 5, 6, 7, 8}, 50);
  const StrategyProfile profile =
      StrategyProfile::symmetric(cfg.roster, Strategy::Truthful, Strategy::Randomise);
  const MechanismMetrics m =
      evaluate_mechanism(make_agreement_handle(0.8), cfg, profile, 300, rng::Stream(1234));
  REQUIRE(m.p_ii_hat.has_value());
  REQUIRE(m.p_uu_hat.has_value());
  CHECK(*m.p_ii_hat >= 0.99);
  CHECK(*m.p_uu_hat >= 0.99);
}

TEST_CASE("evaluation is deterministic and thread-count independent") {
  const GameConfig cfg = config_identity(7, {0, 1, 2, 3}, 12);
  const StrategyProfile profile =
      StrategyProfile::symmetric(cfg.roster, Strategy::Truthful, Strategy::Randomise);
  EvalOptions serial;
  serial.items_grid = {4, 8};
  EvalOptions threaded = serial;
  threaded.threads = 4;

  const MechanismMetrics a = evaluate_mechanism(make_agreement_handle(0.8), cfg, profile,
                                                120, rng::Stream(77), serial);
  const MechanismMetrics b = evaluate_mechanism(make_agreement_handle(0.8), cfg, profile,
                                                120, rng::Stream(77), threaded);
  CHECK(a.p_ii_hat == b.p_ii_hat);
  CHECK(a.p_uu_hat == b.p_uu_hat);
  REQUIRE(a.odds_ratio_curve.size() == b.odds_ratio_curve.size());
  for (std::size_t i = 0; i < a.odds_ratio_curve.size(); ++i) {
    CHECK(a.odds_ratio_curve[i].p_ii == b.odds_ratio_curve[i].p_ii);
    CHECK(a.odds_ratio_curve[i].odds_ii == b.odds_ratio_curve[i].odds_ii);
    CHECK(a.odds_ratio_curve[i].odds_uu == b.odds_ratio_curve[i].odds_uu);
  }
}
