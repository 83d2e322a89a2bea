// Test-only oracles, independent of the library code they check: exact
// binomial tails, a Kolmogorov-Smirnov uniformity test, and a reachability
// check for assignment overlap graphs.

#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "crowdgame/game.hpp"

namespace oracles {

// P(X >= k) for X ~ Binomial(n, p), by direct summation.
inline double binomial_tail_ge(int n, double p, int k) {
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  long double total = 0.0L;
  for (int i = k; i <= n; ++i) {
    const long double log_choose = std::lgamma(n + 1.0L) - std::lgamma(i + 1.0L) -
                                   std::lgamma(n - i + 1.0L);
    total += std::exp(log_choose + i * std::log(static_cast<long double>(p)) +
                      (n - i) * std::log(1.0L - static_cast<long double>(p)));
  }
  return static_cast<double>(std::min(total, 1.0L));
}

// Kolmogorov-Smirnov statistic of a sample against Uniform[0, 1].
inline double ks_statistic_uniform(std::vector<double> sample) {
  std::sort(sample.begin(), sample.end());
  const int n = static_cast<int>(sample.size());
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    const double cdf = sample[i];
    d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - cdf));
  }
  return d;
}

// Asymptotic KS tail probability with the Stephens small-sample correction.
inline double ks_pvalue(double d, int n) {
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const double lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1) ? term : -term;
  }
  return std::clamp(sum, 0.0, 1.0);
}

// True iff the agent graph with an edge between co-labellers is connected.
inline bool overlap_graph_connected(const crowdgame::Assignment& assignment) {
  const int n = assignment.agent_count();
  std::vector<std::vector<int>> adjacent(n);
  for (int j = 0; j < assignment.item_count(); ++j) {
    const auto& agents = assignment.agents_of_item(j);
    for (std::size_t x = 0; x < agents.size(); ++x) {
      for (std::size_t y = x + 1; y < agents.size(); ++y) {
        adjacent[agents[x]].push_back(agents[y]);
        adjacent[agents[y]].push_back(agents[x]);
      }
    }
  }
  std::vector<char> seen(n, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    const int a = frontier.front();
    frontier.pop();
    for (int b : adjacent[a]) {
      if (!seen[b]) {
        seen[b] = 1;
        ++reached;
        frontier.push(b);
      }
    }
  }
  return reached == n;
}

}  // namespace oracles
