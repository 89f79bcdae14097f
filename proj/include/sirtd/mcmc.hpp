#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "sirtd/core.hpp"

namespace sirtd {

// Log density over the unconstrained parameter vector. Must be safe to call
// concurrently from several threads. -inf marks points outside the support.
using LogDensity = std::function<double(const ParamVector&)>;

// Fresh initial point, used when a supplied one has -inf density.
using InitRedraw = std::function<ParamVector(std::mt19937_64&)>;

struct SamplerConfig {
  int n_chains = 4;
  int n_iterations = 2000;  // per chain, warmup included
  int n_warmup = 1000;
  double target_accept = 0.234;
  // Metropolis transitions per stored iteration; each iteration reports the
  // state after this many steps.
  int steps_per_iteration = 100;
  // Adapt a dense proposal covariance instead of per-coordinate scales.
  bool full_covariance = false;
  // Proposal standard deviation per coordinate before any adaptation.
  double initial_scale = 0.1;
  bool parallel = true;
  std::uint64_t seed = 1;

  void validate() const;
};

struct Chain {
  std::uint64_t seed = 0;
  // Post-warmup states; rows are iterations.
  std::vector<ParamVector> unconstrained;
  std::vector<ParamVector> draws;  // constrained, same rows as `unconstrained`
  std::vector<double> log_density;
  double acceptance_rate = 0.0;         // post-warmup Metropolis acceptance
  double warmup_acceptance_rate = 0.0;
  ParamVector proposal_scale{};         // frozen at the end of warmup
  ParamVector final_proposal_scale{};   // as seen by the last transition
};

struct ChainDraws {
  std::vector<Chain> chains;

  std::size_t n_chains() const noexcept { return chains.size(); }
  std::size_t n_draws() const noexcept { return chains.empty() ? 0 : chains.front().draws.size(); }
  // chains[c].draws[i][param] arranged per chain.
  std::vector<std::vector<double>> per_chain(Param p) const;
  std::vector<double> pooled(Param p) const;
  std::vector<EpidemicParams> pooled_params() const;
};

// Seed of chain `chain_index` derived from the run seed.
std::uint64_t chain_seed(std::uint64_t seed, int chain_index);

/// Adaptive random-walk Metropolis over the 7-d unconstrained space.
///
/// During warmup every transition updates a Robbins-Monro estimate of the
/// running mean and (diagonal or dense) covariance, plus a global log scale
/// driven toward `target_accept`, all with learning rate (1 + k)^-0.6.
/// Adaptation stops after warmup. Stored draws are mapped through
/// from_unconstrained.
Chain run_chain(const LogDensity& target, const SamplerConfig& cfg, const ParamVector& init,
                std::uint64_t seed, const InitRedraw& redraw = {});

// One chain per entry of `init`, seeded by chain_seed(cfg.seed, c).
// Throws InitializationError when an init point has -inf density and 100
// redraws do not fix it.
ChainDraws sample(const LogDensity& target, const SamplerConfig& cfg, const std::vector<ParamVector>& init,
                  const InitRedraw& redraw = {});

// Independent prior draws in unconstrained space, one per chain, each from
// its own stream. With a target, draws where it is not finite are redrawn;
// InitializationError after 100 rejections.
std::vector<ParamVector> init_from_prior(const PriorConfig& priors, int n_chains, std::uint64_t seed,
                                         const LogDensity& target = {});

}  // namespace sirtd
