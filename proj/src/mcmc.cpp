#include "sirtd/mcmc.hpp"

#include <cmath>
#include <future>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "sirtd/errors.hpp"
#include "sirtd/model.hpp"

namespace sirtd {

namespace {

constexpr int kDim = static_cast<int>(kNumParams);
constexpr int kMaxInitRetries = 100;
constexpr double kLearningExponent = 0.6;
constexpr double kMinVariance = 1e-14;

using Vec = Eigen::Matrix<double, kDim, 1>;
using Mat = Eigen::Matrix<double, kDim, kDim>;

Vec to_eigen(const ParamVector& a) { return Eigen::Map<const Vec>(a.data()); }

ParamVector to_array(const Vec& v) {
  ParamVector a{};
  Eigen::Map<Vec>(a.data()) = v;
  return a;
}

// Proposal state shared by both adaptation modes: x' = x + scale * L z with
// scale = exp(log_scale) * 2.38 / sqrt(d) and L L^T the adapted covariance
// (diagonal unless full_covariance).
struct Proposal {
  bool full = false;
  double log_scale = 0.0;
  Vec mean = Vec::Zero();
  Mat cov = Mat::Identity();
  Mat chol = Mat::Identity();

  double scale() const { return std::exp(log_scale) * 2.38 / std::sqrt(static_cast<double>(kDim)); }

  void refresh() {
    if (full) {
      Mat reg = cov;
      reg.diagonal().array() += kMinVariance;
      Eigen::LLT<Mat> llt(reg);
      if (llt.info() == Eigen::Success) chol = llt.matrixL();
    } else {
      chol = cov.diagonal().cwiseMax(kMinVariance).cwiseSqrt().asDiagonal();
    }
  }

  void adapt(const Vec& x, double accept_prob, double target, long k) {
    const double gamma = std::pow(1.0 + static_cast<double>(k), -kLearningExponent);
    log_scale += gamma * (accept_prob - target);
    const Vec delta = x - mean;
    mean += gamma * delta;
    if (full) {
      cov += gamma * (delta * delta.transpose() - cov);
    } else {
      cov.diagonal() += gamma * (delta.cwiseProduct(delta) - cov.diagonal());
    }
    cov.diagonal() = cov.diagonal().cwiseMax(kMinVariance);
    refresh();
  }

  ParamVector marginal_sd() const {
    ParamVector out{};
    for (int i = 0; i < kDim; ++i) out[static_cast<std::size_t>(i)] = scale() * chol.row(i).norm();
    return out;
  }
};

}  // namespace

void SamplerConfig::validate() const {
  if (n_chains < 1) throw InvalidConfig("sampler n_chains must be >= 1");
  if (n_warmup < 0 || n_warmup >= n_iterations) throw InvalidConfig("sampler needs 0 <= n_warmup < n_iterations");
  if (!(target_accept > 0.0 && target_accept < 1.0)) throw InvalidConfig("sampler target_accept must be in (0, 1)");
  if (steps_per_iteration < 1) throw InvalidConfig("sampler steps_per_iteration must be >= 1");
  if (!(initial_scale > 0.0)) throw InvalidConfig("sampler initial_scale must be > 0");
}

std::vector<std::vector<double>> ChainDraws::per_chain(Param p) const {
  const auto j = static_cast<std::size_t>(p);
  std::vector<std::vector<double>> out;
  out.reserve(chains.size());
  for (const Chain& c : chains) {
    std::vector<double> col;
    col.reserve(c.draws.size());
    for (const ParamVector& row : c.draws) col.push_back(row[j]);
    out.push_back(std::move(col));
  }
  return out;
}

std::vector<double> ChainDraws::pooled(Param p) const {
  const auto j = static_cast<std::size_t>(p);
  std::vector<double> out;
  for (const Chain& c : chains) {
    for (const ParamVector& row : c.draws) out.push_back(row[j]);
  }
  return out;
}

std::vector<EpidemicParams> ChainDraws::pooled_params() const {
  std::vector<EpidemicParams> out;
  for (const Chain& c : chains) {
    for (const ParamVector& row : c.draws) out.push_back(EpidemicParams::from_array(row));
  }
  return out;
}

std::uint64_t chain_seed(std::uint64_t seed, int chain_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chain_index), 0x5157u};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

Chain run_chain(const LogDensity& target, const SamplerConfig& cfg, const ParamVector& init, std::uint64_t seed,
                const InitRedraw& redraw) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;

  ParamVector x = init;
  double lp = target(x);
  for (int tries = 0; !std::isfinite(lp); ++tries) {
    if (!redraw || tries >= kMaxInitRetries) {
      throw InitializationError("chain initial point has non-finite log density after " + std::to_string(tries) +
                                " redraws");
    }
    x = redraw(rng);
    lp = target(x);
  }

  Proposal prop;
  prop.full = cfg.full_covariance;
  prop.mean = to_eigen(x);
  prop.cov = Mat::Identity() * (cfg.initial_scale * cfg.initial_scale) /
             (prop.scale() * prop.scale());
  prop.refresh();

  Chain chain;
  chain.seed = seed;
  const auto n_keep = static_cast<std::size_t>(cfg.n_iterations - cfg.n_warmup);
  chain.unconstrained.reserve(n_keep);
  chain.draws.reserve(n_keep);
  chain.log_density.reserve(n_keep);

  long k = 0;
  long accepted_warmup = 0, accepted_sampling = 0;
  for (int iter = 0; iter < cfg.n_iterations; ++iter) {
    const bool warmup = iter < cfg.n_warmup;
    if (iter == cfg.n_warmup) chain.proposal_scale = prop.marginal_sd();
    for (int s = 0; s < cfg.steps_per_iteration; ++s) {
      Vec z;
      for (int i = 0; i < kDim; ++i) z(i) = normal(rng);
      const Vec xv = to_eigen(x);
      const ParamVector y = to_array(xv + prop.scale() * (prop.chol * z));
      const double lpy = target(y);
      const double log_ratio = std::isfinite(lpy) ? lpy - lp : -std::numeric_limits<double>::infinity();
      const double accept_prob = log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
      if (std::log(uniform(rng)) < log_ratio) {
        x = y;
        lp = lpy;
        (warmup ? accepted_warmup : accepted_sampling) += 1;
      }
      if (warmup) prop.adapt(to_eigen(x), accept_prob, cfg.target_accept, ++k);
    }
    if (!warmup) {
      chain.unconstrained.push_back(x);
      chain.draws.push_back(from_unconstrained(x).params.to_array());
      chain.log_density.push_back(lp);
    }
  }
  const double steps = static_cast<double>(cfg.steps_per_iteration);
  chain.warmup_acceptance_rate = cfg.n_warmup > 0 ? accepted_warmup / (steps * cfg.n_warmup) : 0.0;
  chain.acceptance_rate = accepted_sampling / (steps * static_cast<double>(n_keep));
  chain.final_proposal_scale = prop.marginal_sd();
  return chain;
}

ChainDraws sample(const LogDensity& target, const SamplerConfig& cfg, const std::vector<ParamVector>& init,
                  const InitRedraw& redraw) {
  cfg.validate();
  if (init.size() != static_cast<std::size_t>(cfg.n_chains)) {
    throw InvalidConfig("sampler needs one initial point per chain");
  }
  ChainDraws out;
  out.chains.resize(init.size());
  if (cfg.parallel && init.size() > 1) {
    std::vector<std::future<Chain>> futures;
    for (std::size_t c = 0; c < init.size(); ++c) {
      futures.push_back(std::async(std::launch::async, [&, c] {
        return run_chain(target, cfg, init[c], chain_seed(cfg.seed, static_cast<int>(c)), redraw);
      }));
    }
    for (std::size_t c = 0; c < init.size(); ++c) out.chains[c] = futures[c].get();
  } else {
    for (std::size_t c = 0; c < init.size(); ++c) {
      out.chains[c] = run_chain(target, cfg, init[c], chain_seed(cfg.seed, static_cast<int>(c)), redraw);
    }
  }
  return out;
}

std::vector<ParamVector> init_from_prior(const PriorConfig& priors, int n_chains, std::uint64_t seed,
                                         const LogDensity& target) {
  priors.validate();
  std::vector<ParamVector> inits;
  for (int c = 0; c < n_chains; ++c) {
    std::mt19937_64 rng(chain_seed(seed, c) ^ 0x9e3779b97f4a7c15ULL);
    for (int tries = 0;; ++tries) {
      if (tries >= kMaxInitRetries) {
        throw InitializationError("no prior draw with finite log density after " +
                                  std::to_string(kMaxInitRetries) + " attempts (chain " + std::to_string(c) + ")");
      }
      const ParamVector v = to_unconstrained(draw_prior(priors, rng));
      const bool finite_point = std::all_of(v.begin(), v.end(), [](double a) { return std::isfinite(a); });
      if (finite_point && (!target || std::isfinite(target(v)))) {
        inits.push_back(v);
        break;
      }
    }
  }
  return inits;
}

}  // namespace sirtd
