#include "sirtd/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

namespace sirtd::special {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;
constexpr double kStirlingUseful = 10.0;

}  // namespace

double lgamma_stirling_diff(double x) {
  if (std::isnan(x)) return x;
  if (x == 0.0) return std::numeric_limits<double>::infinity();
  if (x < kStirlingUseful) return std::lgamma(x) - (kHalfLog2Pi + (x - 0.5) * std::log(x) - x);

  // B_2k / (2k (2k - 1))
  constexpr double series[] = {1.0 / 12.0,   -1.0 / 360.0,         1.0 / 1260.0,
                               -1.0 / 1680.0, 1.0 / 1188.0, -691.0 / 360360.0};
  const double inv_x = 1.0 / x;
  const double inv_x2 = inv_x * inv_x;
  double multiplier = inv_x;
  double result = 0.0;
  for (double c : series) {
    result += c * multiplier;
    multiplier *= inv_x2;
  }
  return result;
}

double lbeta(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) return std::numeric_limits<double>::quiet_NaN();
  const double x = std::min(a, b);
  const double y = std::max(a, b);
  if (x == 0.0) return std::numeric_limits<double>::infinity();
  if (std::isinf(y)) return -std::numeric_limits<double>::infinity();

  if (y < kStirlingUseful) return std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y);

  const double x_over_xy = x / (x + y);
  if (x < kStirlingUseful) {
    // lgamma(y) - lgamma(x + y) through Stirling, lgamma(x) exactly.
    const double diff = lgamma_stirling_diff(y) - lgamma_stirling_diff(x + y);
    const double stirling = (y - 0.5) * std::log1p(-x_over_xy) + x * (1.0 - std::log(x + y));
    return stirling + std::lgamma(x) + diff;
  }

  const double diff = lgamma_stirling_diff(x) + lgamma_stirling_diff(y) - lgamma_stirling_diff(x + y);
  const double stirling =
      (x - 0.5) * std::log(x_over_xy) + y * std::log1p(-x_over_xy) + kHalfLog2Pi - 0.5 * std::log(y);
  return stirling + diff;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

}  // namespace sirtd::special
