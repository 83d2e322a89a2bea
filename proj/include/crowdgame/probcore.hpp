// Discrete probability tables over a finite label alphabet: validated
// distributions and row-stochastic channels, entropy / mutual information in
// bits, total variation, sampling, and the world-constraint validator.

#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "crowdgame/rng.hpp"

namespace crowdgame {

// Label alphabet {0, ..., size()-1}. At least two labels.
class LabelSpace {
 public:
  explicit LabelSpace(int k);
  int size() const { return k_; }
  friend bool operator==(const LabelSpace&, const LabelSpace&) = default;

 private:
  int k_;
};

// Probability vector. Construction rejects negative entries and vectors whose
// mass deviates from 1 by more than kNormTol.
class Distribution {
 public:
  static constexpr double kNormTol = 1e-9;

  explicit Distribution(Eigen::VectorXd probs);
  static Distribution uniform(int k);
  static Distribution point_mass(int k, int label);

  const Eigen::VectorXd& probs() const { return probs_; }
  double operator[](int i) const { return probs_[i]; }
  int size() const { return static_cast<int>(probs_.size()); }

  bool operator==(const Distribution& other) const { return probs_ == other.probs_; }

 private:
  Eigen::VectorXd probs_;
};

// Row-stochastic table: row y is the signal distribution conditional on the
// true label being y. Square over the label alphabet.
class ConditionalTable {
 public:
  explicit ConditionalTable(Eigen::MatrixXd rows);
  static ConditionalTable identity(int k);
  // Correct label with probability 1-flip, remaining mass uniform on the rest.
  static ConditionalTable symmetric_noise(int k, double flip);

  const Eigen::MatrixXd& rows() const { return rows_; }
  Distribution row(int y) const { return Distribution(rows_.row(y).transpose()); }
  int label_count() const { return static_cast<int>(rows_.rows()); }

  bool operator==(const ConditionalTable& other) const { return rows_ == other.rows_; }

 private:
  Eigen::MatrixXd rows_;
};

// Joint law of (truth, prejudice, signal) in factored form: the prejudice
// prior is stored unconditionally, so truth and prejudice are independent by
// construction. The informativeness and distinct-prior constraints are
// numeric and checked by validate_world.
class WorldDistribution {
 public:
  WorldDistribution(LabelSpace labels, Distribution truth_prior,
                    Distribution prejudice_prior, ConditionalTable signal_channel);

  const LabelSpace& labels() const { return labels_; }
  const Distribution& truth_prior() const { return truth_prior_; }
  const Distribution& prejudice_prior() const { return prejudice_prior_; }
  const ConditionalTable& signal_channel() const { return signal_channel_; }

  bool operator==(const WorldDistribution& other) const = default;

 private:
  LabelSpace labels_;
  Distribution truth_prior_;
  Distribution prejudice_prior_;
  ConditionalTable signal_channel_;
};

// Shannon entropy in bits; 0 log 0 taken as 0.
double entropy(const Distribution& d);

// Mutual information in bits of a joint table. Entries must be nonnegative
// and sum to 1 within Distribution::kNormTol; throws std::invalid_argument
// otherwise. Zero cells contribute nothing.
double mutual_information(const Eigen::MatrixXd& joint);

double total_variation(const Distribution& a, const Distribution& b);

// p(y, i) = truth_prior[y] * channel(y, i).
Eigen::MatrixXd joint_truth_signal(const Distribution& truth_prior,
                                   const ConditionalTable& channel);

// Inverse-CDF draw; consumes exactly one uniform.
int sample_label(const Distribution& d, rng::Stream& stream);

struct ConstraintCheck {
  std::string id;
  bool passed;
  double measured;
  std::string detail;
};

struct ValidationReport {
  std::vector<ConstraintCheck> checks;
  bool all_passed() const;
};

// Checks the three world constraints:
//   prejudice_independent  I(truth; prejudice) = 0, by construction
//   signal_informative     I(truth; signal)   > info_tol
//   distinct_priors        TV(P(Y), P(U))     > prior_gap_tol
// Failures are reported, never thrown.
ValidationReport validate_world(const WorldDistribution& w, double info_tol = 1e-6,
                                double prior_gap_tol = 1e-6);

}  // namespace crowdgame
