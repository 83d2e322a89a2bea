// Small numeric-statistics kit: regularized incomplete gamma, chi-square
// survival function, and a two-sample chi-square homogeneity test over
// categorical counts.

#pragma once

#include <vector>

namespace crowdgame::stats {

// P(a, x) and Q(a, x) = 1 - P(a, x); series for x < a + 1, continued
// fraction otherwise. a > 0, x >= 0.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

// Upper tail of the chi-square distribution with dof degrees of freedom.
double chi_square_sf(double x, double dof);

struct ChiSquareTest {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

// Tests whether two samples of categorical counts come from the same law.
// Categories with zero pooled count are dropped; with fewer than two
// populated categories (or an empty sample) the test is vacuous (p = 1).
ChiSquareTest chi_square_homogeneity(const std::vector<long long>& counts_a,
                                     const std::vector<long long>& counts_b);

}  // namespace crowdgame::stats
