#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace sirtd {

inline constexpr std::size_t kNumParams = 7;

// Column order of every parameter vector, draw matrix and summary table.
// Persisted chains depend on it, so it must never change.
enum class Param : std::size_t { beta = 0, omega, lambda, d_I, d_T, phi_deaths, phi_tweets };

inline constexpr std::array<std::string_view, kNumParams> kParamNames = {
    "beta", "omega", "lambda", "d_I", "d_T", "phi_deaths", "phi_tweets"};

using ParamVector = std::array<double, kNumParams>;

/// Latent ODE rates plus the two observation-channel precision parameters.
///
/// `phi_deaths` and `phi_tweets` enter the negative binomial as dispersion
/// 1/phi, so a larger phi means *more* over-dispersion.
struct EpidemicParams {
  double beta = 1.0;        // contacts leading to transmission, per day
  double omega = 0.5;       // probability an infection becomes terminal
  double lambda = 0.5;      // daily tweet probability per infected
  double d_I = 1.0;         // mean days infectious
  double d_T = 1.0;         // mean days terminally ill
  double phi_deaths = 1.0;
  double phi_tweets = 1.0;

  bool is_valid() const noexcept;
  // Throws InvalidParams naming the first offending field.
  void validate() const;

  ParamVector to_array() const noexcept;
  static EpidemicParams from_array(const ParamVector& v) noexcept;

  friend bool operator==(const EpidemicParams&, const EpidemicParams&) = default;
};

struct CompartmentState {
  double S = 0.0;
  double I = 0.0;
  double R = 0.0;
  double T = 0.0;
  double D = 0.0;

  double total() const noexcept { return S + I + R + T + D; }
  std::array<double, 5> to_array() const noexcept { return {S, I, R, T, D}; }
  static CompartmentState from_array(const std::array<double, 5>& a) noexcept {
    return {a[0], a[1], a[2], a[3], a[4]};
  }

  friend bool operator==(const CompartmentState&, const CompartmentState&) = default;
};

struct Trajectory {
  std::vector<double> days;
  std::vector<CompartmentState> states;

  std::size_t size() const noexcept { return days.size(); }
};

struct ObservedData {
  std::vector<int> days;
  std::vector<std::int64_t> cumulative_deaths;
  std::vector<std::int64_t> tweet_counts;
  double N = 0.0;
  CompartmentState y0;
  // Replicates drawn from the observation model put independent noise on each
  // cumulative count, so they are not monotone. Real data must be.
  bool require_monotone_deaths = true;

  std::size_t size() const noexcept { return days.size(); }
  void validate() const;
};

enum class OmegaPrior { truncated_normal, beta };

/// Hyperparameters of the prior. Defaults are the configuration used for all
/// experiments: beta ~ N+(2,1), omega ~ N(0.4,0.5) truncated to [0,1],
/// lambda ~ Beta(1,2), d_I ~ N+(7,2), d_T ~ N+(10,2), phi, phi_tweets ~ Exp(5).
struct PriorConfig {
  double mu_beta = 2.0;
  double sigma_beta = 1.0;

  OmegaPrior omega_family = OmegaPrior::truncated_normal;
  double mu_omega = 0.4;
  double sigma_omega = 0.5;
  double alpha_omega = 1.0;
  double beta_omega = 1.0;

  double alpha_lambda = 1.0;
  double beta_lambda = 2.0;

  double mu_dI = 7.0;
  double sigma_dI = 2.0;
  double mu_dT = 10.0;
  double sigma_dT = 2.0;

  double rate_phi = 5.0;
  double rate_phi_tweets = 5.0;

  void validate() const;
};

// Unconstrained coordinates: log for (beta, d_I, d_T, phi, phi_tweets), logit
// for (omega, lambda), in Param order. Boundary values of omega or lambda map
// to +/-inf.
ParamVector to_unconstrained(const EpidemicParams& params) noexcept;

struct Unconstrained {
  EpidemicParams params;
  double log_jacobian = 0.0;
};

// Inverse of to_unconstrained. log_jacobian is log|det d(params)/dv|.
// Log-scale components are capped at the largest finite double.
Unconstrained from_unconstrained(const ParamVector& v) noexcept;

double logistic(double x) noexcept;
double logit(double p) noexcept;
// log(logistic(x)), accurate for large |x|.
double log_logistic(double x) noexcept;

}  // namespace sirtd
