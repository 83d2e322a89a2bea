#include "crowdgame/probcore.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace crowdgame {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

LabelSpace::LabelSpace(int k) : k_(k) {
  require(k >= 2, "label space needs at least two labels, got " + std::to_string(k));
}

Distribution::Distribution(Eigen::VectorXd probs) : probs_(std::move(probs)) {
  require(probs_.size() >= 1, "distribution must be non-empty");
  require((probs_.array() >= 0.0).all(), "distribution entries must be non-negative");
  require(std::abs(probs_.sum() - 1.0) <= kNormTol,
          "distribution mass must be 1 within 1e-9, got " + std::to_string(probs_.sum()));
}

Distribution Distribution::uniform(int k) {
  return Distribution(Eigen::VectorXd::Constant(k, 1.0 / k));
}

Distribution Distribution::point_mass(int k, int label) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(k);
  p[label] = 1.0;
  return Distribution(std::move(p));
}

ConditionalTable::ConditionalTable(Eigen::MatrixXd rows) : rows_(std::move(rows)) {
  require(rows_.rows() == rows_.cols(), "conditional table must be square over the label space");
  for (int y = 0; y < rows_.rows(); ++y) {
    Distribution check{rows_.row(y).transpose()};  // validates the row
    (void)check;
  }
}

ConditionalTable ConditionalTable::identity(int k) {
  return ConditionalTable(Eigen::MatrixXd::Identity(k, k));
}

ConditionalTable ConditionalTable::symmetric_noise(int k, double flip) {
  require(flip >= 0.0 && flip <= 1.0, "flip probability must lie in [0,1]");
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(k, k, flip / (k - 1));
  m.diagonal().setConstant(1.0 - flip);
  return ConditionalTable(std::move(m));
}

WorldDistribution::WorldDistribution(LabelSpace labels, Distribution truth_prior,
                                     Distribution prejudice_prior,
                                     ConditionalTable signal_channel)
    : labels_(labels),
      truth_prior_(std::move(truth_prior)),
      prejudice_prior_(std::move(prejudice_prior)),
      signal_channel_(std::move(signal_channel)) {
  const int k = labels_.size();
  require(truth_prior_.size() == k, "truth prior size must match the label space");
  require(prejudice_prior_.size() == k, "prejudice prior size must match the label space");
  require(signal_channel_.label_count() == k, "signal channel size must match the label space");
}

double entropy(const Distribution& d) {
  double h = 0.0;
  for (int i = 0; i < d.size(); ++i) {
    const double p = d[i];
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

double mutual_information(const Eigen::MatrixXd& joint) {
  if ((joint.array() < 0.0).any())
    throw std::invalid_argument("joint table entries must be non-negative");
  if (std::abs(joint.sum() - 1.0) > Distribution::kNormTol)
    throw std::invalid_argument("joint table mass must be 1 within 1e-9, got " +
                                std::to_string(joint.sum()));
  const Eigen::VectorXd row_marginal = joint.rowwise().sum();
  const Eigen::VectorXd col_marginal = joint.colwise().sum();
  double mi = 0.0;
  for (int i = 0; i < joint.rows(); ++i) {
    for (int j = 0; j < joint.cols(); ++j) {
      const double p = joint(i, j);
      if (p > 0.0) mi += p * std::log2(p / (row_marginal[i] * col_marginal[j]));
    }
  }
  return mi;
}

double total_variation(const Distribution& a, const Distribution& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("total variation needs distributions on the same label space");
  return 0.5 * (a.probs() - b.probs()).lpNorm<1>();
}

Eigen::MatrixXd joint_truth_signal(const Distribution& truth_prior,
                                   const ConditionalTable& channel) {
  if (truth_prior.size() != channel.label_count())
    throw std::invalid_argument("prior and channel label spaces differ");
  return truth_prior.probs().asDiagonal() * channel.rows();
}

int sample_label(const Distribution& d, rng::Stream& stream) {
  const double u = stream.uniform01();
  double acc = 0.0;
  const int n = d.size();
  for (int i = 0; i < n; ++i) {
    acc += d[i];
    if (u < acc) return i;
  }
  // Residual rounding mass lands on the last label with positive weight.
  for (int i = n - 1; i >= 0; --i) {
    if (d[i] > 0.0) return i;
  }
  return n - 1;
}

bool ValidationReport::all_passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

ValidationReport validate_world(const WorldDistribution& w, double info_tol,
                                double prior_gap_tol) {
  ValidationReport report;

  report.checks.push_back(
      {"prejudice_independent", true, 0.0,
       "I(truth; prejudice) = 0 by construction: the prejudice prior is stored "
       "unconditionally"});

  const double info =
      mutual_information(joint_truth_signal(w.truth_prior(), w.signal_channel()));
  {
    std::ostringstream os;
    os << "I(truth; signal) = " << info << " bits, required > " << info_tol;
    report.checks.push_back({"signal_informative", info > info_tol, info, os.str()});
  }

  const double gap = total_variation(w.truth_prior(), w.prejudice_prior());
  {
    std::ostringstream os;
    os << "TV(P(Y), P(U)) = " << gap << ", required > " << prior_gap_tol
       << " (priors must differ)";
    report.checks.push_back({"distinct_priors", gap > prior_gap_tol, gap, os.str()});
  }

  return report;
}

}  // namespace crowdgame
