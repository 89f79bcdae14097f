#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "sirtd/core.hpp"
#include "sirtd/mcmc.hpp"
#include "sirtd/ode.hpp"

namespace sirtd {

struct FitContext {
  ObservedData observed;
  PriorConfig priors;
  SolverConfig solver;

  void validate() const;
  // Observation days as the ODE output grid.
  std::vector<double> output_days() const;
};

// Means below this are raised to it before any negative binomial evaluation.
inline constexpr double kMeanFloor = 1e-10;

/// Negative binomial log pmf with mean `mu` and dispersion `disp`
/// (variance mu + mu^2 / disp). Throws DomainError unless mu, disp > 0 and
/// y >= 0.
double nb2_log_pmf(std::int64_t y, double mu, double disp);

double log_prior(const EpidemicParams& params, const PriorConfig& priors);

/// Sum over days of the death-channel and tweet-channel NB log pmfs, with
/// means D(t) and lambda * I(t) from the ODE and dispersions 1/phi_deaths and
/// 1/phi_tweets. Returns -inf when the solver fails (likelihood rejection).
double log_likelihood(const EpidemicParams& params, const FitContext& ctx);

struct LogPosteriorTerms {
  double log_prior = 0.0;
  double log_likelihood = 0.0;
  double log_jacobian = 0.0;
  double total() const noexcept { return log_prior + log_likelihood + log_jacobian; }
};

LogPosteriorTerms log_posterior_terms(const ParamVector& v, const FitContext& ctx);

// MCMC target: log prior + log likelihood + log Jacobian at
// from_unconstrained(v); -inf on rejection or for non-finite v.
double log_posterior_unconstrained(const ParamVector& v, const FitContext& ctx);

EpidemicParams draw_prior(const PriorConfig& priors, std::mt19937_64& rng);

// One negative binomial draw with mean mu and dispersion disp.
std::int64_t draw_nb2(double mu, double disp, std::mt19937_64& rng);

/// Observations drawn from the model itself: independent NB draws around the
/// ODE means on days 0..n_days-1. The deaths series is not monotone, so the
/// result has require_monotone_deaths = false.
ObservedData simulate_observations(const EpidemicParams& params, const CompartmentState& y0, double N, int n_days,
                                   const SolverConfig& solver, std::uint64_t seed);

// Channel order of the predictive table.
inline constexpr std::array<std::string_view, 7> kChannels = {"deaths", "tweets", "S", "I", "R", "T", "D"};

struct PredictiveBand {
  std::vector<double> mean;
  std::vector<double> q5;
  std::vector<double> q95;
};

struct PredictiveTable {
  std::vector<double> days;
  std::array<PredictiveBand, 7> bands;  // indexed like kChannels
  std::size_t n_used = 0;
  std::size_t n_skipped = 0;  // draws whose ODE solve failed

  const PredictiveBand& channel(std::string_view name) const;
};

/// Posterior predictive summary over every stored draw.
///
/// `mean` is the average of the ODE mean curves (D(t), lambda * I(t) and the
/// five compartments). For the compartments q5/q95 are quantiles of those
/// curves. For deaths and tweets the band is the hull of the curve quantiles
/// and the quantiles of one NB replicate per draw and day; a replicate band
/// alone collapses to 0 whenever the mean is well below one count.
PredictiveTable posterior_predictive(const ChainDraws& draws, const FitContext& ctx, std::uint64_t seed);

// Validates the context, draws initial points from the prior (redrawing any
// with a non-finite posterior) and runs the sampler on the log posterior.
ChainDraws fit_posterior(const FitContext& ctx, const SamplerConfig& cfg);

}  // namespace sirtd
