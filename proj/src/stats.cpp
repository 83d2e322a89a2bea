#include "crowdgame/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace crowdgame::stats {

namespace {

constexpr int kMaxIterations = 500;
constexpr double kEps = 1e-15;

// Lower regularized gamma by power series.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < kMaxIterations; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized gamma by Lentz continued fraction.
double gamma_q_fraction(double a, double x) {
  const double tiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIterations; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0)
    throw std::invalid_argument("regularized_gamma_p needs a > 0 and x >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0)
    throw std::invalid_argument("regularized_gamma_q needs a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_fraction(a, x);
}

double chi_square_sf(double x, double dof) {
  if (dof <= 0.0) throw std::invalid_argument("chi_square_sf needs dof > 0");
  if (x <= 0.0) return 1.0;
  return regularized_gamma_q(0.5 * dof, 0.5 * x);
}

ChiSquareTest chi_square_homogeneity(const std::vector<long long>& counts_a,
                                     const std::vector<long long>& counts_b) {
  if (counts_a.size() != counts_b.size())
    throw std::invalid_argument("chi_square_homogeneity needs equal category counts");

  long long total_a = 0, total_b = 0;
  for (long long c : counts_a) total_a += c;
  for (long long c : counts_b) total_b += c;

  ChiSquareTest result;
  if (total_a == 0 || total_b == 0) return result;

  const double grand = static_cast<double>(total_a + total_b);
  int categories = 0;
  double statistic = 0.0;
  for (std::size_t k = 0; k < counts_a.size(); ++k) {
    const long long pooled = counts_a[k] + counts_b[k];
    if (pooled == 0) continue;
    ++categories;
    const double expected_a = static_cast<double>(total_a) * pooled / grand;
    const double expected_b = static_cast<double>(total_b) * pooled / grand;
    const double da = counts_a[k] - expected_a;
    const double db = counts_b[k] - expected_b;
    statistic += da * da / expected_a + db * db / expected_b;
  }
  if (categories < 2) return result;

  result.statistic = statistic;
  result.dof = categories - 1;
  result.p_value = chi_square_sf(statistic, result.dof);
  return result;
}

}  // namespace crowdgame::stats
