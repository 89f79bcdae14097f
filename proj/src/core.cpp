#include "sirtd/core.hpp"

#include <cfloat>
#include <cmath>
#include <string>

#include "sirtd/errors.hpp"

namespace sirtd {

namespace {

constexpr bool is_log_scaled(std::size_t i) noexcept {
  return i != static_cast<std::size_t>(Param::omega) && i != static_cast<std::size_t>(Param::lambda);
}

bool positive(double x) noexcept { return std::isfinite(x) && x > 0.0; }
bool unit_interval(double x) noexcept { return x >= 0.0 && x <= 1.0; }

// Largest argument for which exp() stays finite.
const double kMaxLog = std::log(DBL_MAX);

}  // namespace

double logistic(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logit(double p) noexcept { return std::log(p) - std::log1p(-p); }

double log_logistic(double x) noexcept {
  // -softplus(-x)
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

bool EpidemicParams::is_valid() const noexcept {
  return positive(beta) && unit_interval(omega) && unit_interval(lambda) && positive(d_I) &&
         positive(d_T) && positive(phi_deaths) && positive(phi_tweets);
}

void EpidemicParams::validate() const {
  auto fail = [](std::string_view name, double v, const char* rule) {
    throw InvalidParams(std::string(name) + " = " + std::to_string(v) + " must be " + rule);
  };
  if (!positive(beta)) fail("beta", beta, "> 0");
  if (!unit_interval(omega)) fail("omega", omega, "in [0, 1]");
  if (!unit_interval(lambda)) fail("lambda", lambda, "in [0, 1]");
  if (!positive(d_I)) fail("d_I", d_I, "> 0");
  if (!positive(d_T)) fail("d_T", d_T, "> 0");
  if (!positive(phi_deaths)) fail("phi_deaths", phi_deaths, "> 0");
  if (!positive(phi_tweets)) fail("phi_tweets", phi_tweets, "> 0");
}

ParamVector EpidemicParams::to_array() const noexcept {
  return {beta, omega, lambda, d_I, d_T, phi_deaths, phi_tweets};
}

EpidemicParams EpidemicParams::from_array(const ParamVector& v) noexcept {
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
}

void ObservedData::validate() const {
  const std::size_t n = days.size();
  if (n == 0) throw InvariantViolation("observed data is empty");
  if (cumulative_deaths.size() != n || tweet_counts.size() != n) {
    throw InvariantViolation("days, cumulative_deaths and tweet_counts must share one length");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (days[i] <= days[i - 1]) throw InvariantViolation("day indices must be strictly increasing");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (cumulative_deaths[i] < 0) throw InvariantViolation("negative death count at day " + std::to_string(days[i]));
    if (tweet_counts[i] < 0) throw InvariantViolation("negative tweet count at day " + std::to_string(days[i]));
    if (require_monotone_deaths && i > 0 && cumulative_deaths[i] < cumulative_deaths[i - 1]) {
      throw NonMonotoneDeaths("cumulative deaths decrease at day " + std::to_string(days[i]));
    }
  }
  if (!positive(N)) throw InvariantViolation("population N must be > 0");
  for (double c : y0.to_array()) {
    if (!std::isfinite(c) || c < 0.0) throw InvariantViolation("initial state has a negative compartment");
  }
  if (std::abs(y0.total() - N) > 1e-9 * N) {
    throw InvariantViolation("initial state sums to " + std::to_string(y0.total()) + ", expected N = " +
                             std::to_string(N));
  }
}

void PriorConfig::validate() const {
  auto require = [](double v, const char* name) {
    if (!positive(v)) throw InvalidConfig(std::string("prior hyperparameter ") + name + " must be > 0");
  };
  auto finite = [](double v, const char* name) {
    if (!std::isfinite(v)) throw InvalidConfig(std::string("prior hyperparameter ") + name + " must be finite");
  };
  finite(mu_beta, "mu_beta");
  finite(mu_omega, "mu_omega");
  finite(mu_dI, "mu_dI");
  finite(mu_dT, "mu_dT");
  require(sigma_beta, "sigma_beta");
  require(sigma_omega, "sigma_omega");
  require(alpha_omega, "alpha_omega");
  require(beta_omega, "beta_omega");
  require(alpha_lambda, "alpha_lambda");
  require(beta_lambda, "beta_lambda");
  require(sigma_dI, "sigma_dI");
  require(sigma_dT, "sigma_dT");
  require(rate_phi, "rate_phi");
  require(rate_phi_tweets, "rate_phi_tweets");
}

ParamVector to_unconstrained(const EpidemicParams& params) noexcept {
  const ParamVector x = params.to_array();
  ParamVector v{};
  for (std::size_t i = 0; i < kNumParams; ++i) v[i] = is_log_scaled(i) ? std::log(x[i]) : logit(x[i]);
  return v;
}

Unconstrained from_unconstrained(const ParamVector& v) noexcept {
  ParamVector x{};
  double log_jacobian = 0.0;
  for (std::size_t i = 0; i < kNumParams; ++i) {
    if (is_log_scaled(i)) {
      const double z = std::min(v[i], kMaxLog);
      x[i] = std::exp(z);
      log_jacobian += z;
    } else {
      x[i] = logistic(v[i]);
      // d sigma / dv = sigma(v) * sigma(-v)
      log_jacobian += log_logistic(v[i]) + log_logistic(-v[i]);
    }
  }
  return {EpidemicParams::from_array(x), log_jacobian};
}

}  // namespace sirtd
