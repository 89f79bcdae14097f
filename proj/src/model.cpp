#include "sirtd/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "sirtd/diagnostics.hpp"
#include "sirtd/errors.hpp"
#include "sirtd/special.hpp"

namespace sirtd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kHalfLog2Pi = 0.91893853320467274178;

double normal_log_density(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return -kHalfLog2Pi - std::log(sigma) - 0.5 * z * z;
}

// Normal(mu, sigma) truncated to [lo, hi].
double truncated_normal_lpdf(double x, double mu, double sigma, double lo, double hi) {
  if (!(x >= lo && x <= hi)) return kNegInf;
  const double upper = std::isinf(hi) ? 1.0 : special::normal_cdf((hi - mu) / sigma);
  const double mass = upper - special::normal_cdf((lo - mu) / sigma);
  return normal_log_density(x, mu, sigma) - std::log(mass);
}

double beta_lpdf(double x, double a, double b) {
  if (!(x >= 0.0 && x <= 1.0)) return kNegInf;
  double lp = -special::lbeta(a, b);
  if (a != 1.0) lp += (a - 1.0) * std::log(x);
  if (b != 1.0) lp += (b - 1.0) * std::log1p(-x);
  return lp;
}

double exponential_lpdf(double x, double rate) {
  if (!(x >= 0.0)) return kNegInf;
  return std::log(rate) - rate * x;
}

double draw_truncated_normal(double mu, double sigma, double lo, double hi, std::mt19937_64& rng) {
  const double p_lo = special::normal_cdf((lo - mu) / sigma);
  const double p_hi = std::isinf(hi) ? 1.0 : special::normal_cdf((hi - mu) / sigma);
  std::uniform_real_distribution<double> u(p_lo, p_hi);
  const double x = mu + sigma * special::normal_quantile(u(rng));
  return std::clamp(x, lo, hi);
}

double draw_beta(double a, double b, std::mt19937_64& rng) {
  std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  return x / (x + y);
}

}  // namespace

void FitContext::validate() const {
  observed.validate();
  priors.validate();
  solver.validate();
}

std::vector<double> FitContext::output_days() const { return {observed.days.begin(), observed.days.end()}; }

double nb2_log_pmf(std::int64_t y, double mu, double disp) {
  if (!(mu > 0.0) || !(disp > 0.0) || y < 0 || !std::isfinite(mu) || !std::isfinite(disp)) {
    throw DomainError("nb2_log_pmf requires y >= 0 and finite mu, disp > 0 (got y=" + std::to_string(y) +
                      ", mu=" + std::to_string(mu) + ", disp=" + std::to_string(disp) + ")");
  }
  // disp * (log disp - log(mu + disp))
  const double zero_term = -disp * std::log1p(mu / disp);
  if (y == 0) return zero_term;

  const double n = static_cast<double>(y);
  // log Gamma(y + disp) - log Gamma(disp) - log Gamma(y + 1)
  const double log_choose = -std::log(n + disp) - special::lbeta(n + 1.0, disp);
  // log mu - log(mu + disp)
  const double log_p = mu > disp ? -std::log1p(disp / mu) : std::log(mu / (mu + disp));
  return log_choose + zero_term + n * log_p;
}

double log_prior(const EpidemicParams& p, const PriorConfig& priors) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  double lp = truncated_normal_lpdf(p.beta, priors.mu_beta, priors.sigma_beta, 0.0, inf);
  if (priors.omega_family == OmegaPrior::truncated_normal) {
    lp += truncated_normal_lpdf(p.omega, priors.mu_omega, priors.sigma_omega, 0.0, 1.0);
  } else {
    lp += beta_lpdf(p.omega, priors.alpha_omega, priors.beta_omega);
  }
  lp += beta_lpdf(p.lambda, priors.alpha_lambda, priors.beta_lambda);
  lp += truncated_normal_lpdf(p.d_I, priors.mu_dI, priors.sigma_dI, 0.0, inf);
  lp += truncated_normal_lpdf(p.d_T, priors.mu_dT, priors.sigma_dT, 0.0, inf);
  lp += exponential_lpdf(p.phi_deaths, priors.rate_phi);
  lp += exponential_lpdf(p.phi_tweets, priors.rate_phi_tweets);
  return lp;
}

double log_likelihood(const EpidemicParams& params, const FitContext& ctx) {
  const ObservedData& obs = ctx.observed;
  const std::vector<double> days = ctx.output_days();
  Trajectory traj;
  try {
    traj = solve_sirtd(params, obs.y0, obs.N, days, ctx.solver);
  } catch (const NumericalError&) {
    return kNegInf;
  }

  const double disp_deaths = 1.0 / params.phi_deaths;
  const double disp_tweets = 1.0 / params.phi_tweets;
  double ll = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const CompartmentState& s = traj.states[i];
    const double mu_deaths = std::max(s.D, kMeanFloor);
    const double mu_tweets = std::max(s.I * params.lambda, kMeanFloor);
    ll += nb2_log_pmf(obs.cumulative_deaths[i], mu_deaths, disp_deaths);
    ll += nb2_log_pmf(obs.tweet_counts[i], mu_tweets, disp_tweets);
  }
  return std::isnan(ll) ? kNegInf : ll;
}

LogPosteriorTerms log_posterior_terms(const ParamVector& v, const FitContext& ctx) {
  LogPosteriorTerms terms;
  if (!std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); })) {
    terms.log_likelihood = kNegInf;
    return terms;
  }
  const Unconstrained u = from_unconstrained(v);
  terms.log_jacobian = u.log_jacobian;
  if (!u.params.is_valid()) {
    terms.log_likelihood = kNegInf;
    return terms;
  }
  terms.log_prior = log_prior(u.params, ctx.priors);
  terms.log_likelihood = log_likelihood(u.params, ctx);
  return terms;
}

double log_posterior_unconstrained(const ParamVector& v, const FitContext& ctx) {
  const double lp = log_posterior_terms(v, ctx).total();
  return std::isnan(lp) ? kNegInf : lp;
}

EpidemicParams draw_prior(const PriorConfig& priors, std::mt19937_64& rng) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  EpidemicParams p;
  p.beta = draw_truncated_normal(priors.mu_beta, priors.sigma_beta, 0.0, inf, rng);
  p.omega = priors.omega_family == OmegaPrior::truncated_normal
                ? draw_truncated_normal(priors.mu_omega, priors.sigma_omega, 0.0, 1.0, rng)
                : draw_beta(priors.alpha_omega, priors.beta_omega, rng);
  p.lambda = draw_beta(priors.alpha_lambda, priors.beta_lambda, rng);
  p.d_I = draw_truncated_normal(priors.mu_dI, priors.sigma_dI, 0.0, inf, rng);
  p.d_T = draw_truncated_normal(priors.mu_dT, priors.sigma_dT, 0.0, inf, rng);
  p.phi_deaths = std::exponential_distribution<double>(priors.rate_phi)(rng);
  p.phi_tweets = std::exponential_distribution<double>(priors.rate_phi_tweets)(rng);
  return p;
}

std::int64_t draw_nb2(double mu, double disp, std::mt19937_64& rng) {
  // Gamma-Poisson mixture: rate ~ Gamma(disp, mu / disp).
  std::gamma_distribution<double> gamma(disp, mu / disp);
  const double rate = gamma(rng);
  if (!(rate > 0.0)) return 0;
  return std::poisson_distribution<std::int64_t>(rate)(rng);
}

ObservedData simulate_observations(const EpidemicParams& params, const CompartmentState& y0, double N, int n_days,
                                   const SolverConfig& solver, std::uint64_t seed) {
  params.validate();
  if (n_days < 1) throw InvalidConfig("n_days must be >= 1");
  std::vector<double> days(static_cast<std::size_t>(n_days));
  for (int d = 0; d < n_days; ++d) days[static_cast<std::size_t>(d)] = d;
  const Trajectory traj = solve_sirtd(params, y0, N, days, solver);

  std::mt19937_64 rng(seed);
  ObservedData obs;
  obs.N = N;
  obs.y0 = y0;
  obs.require_monotone_deaths = false;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const CompartmentState& s = traj.states[i];
    obs.days.push_back(static_cast<int>(i));
    obs.cumulative_deaths.push_back(draw_nb2(std::max(s.D, kMeanFloor), 1.0 / params.phi_deaths, rng));
    obs.tweet_counts.push_back(draw_nb2(std::max(s.I * params.lambda, kMeanFloor), 1.0 / params.phi_tweets, rng));
  }
  return obs;
}

const PredictiveBand& PredictiveTable::channel(std::string_view name) const {
  for (std::size_t i = 0; i < kChannels.size(); ++i) {
    if (kChannels[i] == name) return bands[i];
  }
  throw DomainError("unknown predictive channel " + std::string(name));
}

PredictiveTable posterior_predictive(const ChainDraws& draws, const FitContext& ctx, std::uint64_t seed) {
  const std::vector<EpidemicParams> params = draws.pooled_params();
  if (params.empty()) throw DomainError("posterior_predictive needs at least one draw");

  const std::vector<double> days = ctx.output_days();
  const std::size_t n_days = days.size();
  std::mt19937_64 rng(seed);

  // curves[channel][day] over draws; replicates only for deaths and tweets.
  std::array<std::vector<std::vector<double>>, 7> curves;
  std::array<std::vector<std::vector<double>>, 2> replicates;
  for (auto& c : curves) c.assign(n_days, {});
  for (auto& r : replicates) r.assign(n_days, {});

  PredictiveTable table;
  table.days = days;
  for (const EpidemicParams& p : params) {
    Trajectory traj;
    try {
      traj = solve_sirtd(p, ctx.observed.y0, ctx.observed.N, days, ctx.solver);
    } catch (const NumericalError&) {
      ++table.n_skipped;
      continue;
    }
    ++table.n_used;
    for (std::size_t d = 0; d < n_days; ++d) {
      const CompartmentState& s = traj.states[d];
      const double mu_deaths = s.D;
      const double mu_tweets = s.I * p.lambda;
      const std::array<double, 7> values = {mu_deaths, mu_tweets, s.S, s.I, s.R, s.T, s.D};
      for (std::size_t c = 0; c < 7; ++c) curves[c][d].push_back(values[c]);
      replicates[0][d].push_back(
          static_cast<double>(draw_nb2(std::max(mu_deaths, kMeanFloor), 1.0 / p.phi_deaths, rng)));
      replicates[1][d].push_back(
          static_cast<double>(draw_nb2(std::max(mu_tweets, kMeanFloor), 1.0 / p.phi_tweets, rng)));
    }
  }
  if (table.n_used == 0) throw NumericalError("posterior_predictive: the ODE solve failed for every draw");

  for (std::size_t c = 0; c < 7; ++c) {
    PredictiveBand& band = table.bands[c];
    band.mean.resize(n_days);
    band.q5.resize(n_days);
    band.q95.resize(n_days);
    for (std::size_t d = 0; d < n_days; ++d) {
      std::vector<double>& v = curves[c][d];
      double sum = 0.0;
      for (double x : v) sum += x;
      band.mean[d] = sum / static_cast<double>(v.size());
      std::sort(v.begin(), v.end());
      band.q5[d] = quantile_sorted(v, 0.05);
      band.q95[d] = quantile_sorted(v, 0.95);
      if (c < 2) {
        std::vector<double>& r = replicates[c][d];
        std::sort(r.begin(), r.end());
        band.q5[d] = std::min(band.q5[d], quantile_sorted(r, 0.05));
        band.q95[d] = std::max(band.q95[d], quantile_sorted(r, 0.95));
      }
    }
  }
  return table;
}

ChainDraws fit_posterior(const FitContext& ctx, const SamplerConfig& cfg) {
  ctx.validate();
  cfg.validate();
  const LogDensity target = [&ctx](const ParamVector& v) { return log_posterior_unconstrained(v, ctx); };
  const std::vector<ParamVector> init = init_from_prior(ctx.priors, cfg.n_chains, cfg.seed, target);
  const InitRedraw redraw = [&ctx](std::mt19937_64& rng) { return to_unconstrained(draw_prior(ctx.priors, rng)); };
  return sample(target, cfg, init, redraw);
}

}  // namespace sirtd
