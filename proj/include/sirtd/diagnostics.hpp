#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sirtd/core.hpp"
#include "sirtd/mcmc.hpp"

namespace sirtd {

// Draws of one parameter, one inner vector per chain. Chains must share a
// length of at least 4.
using ChainSeries = std::vector<std::vector<double>>;

// Linear interpolation between order statistics (R type 7). `sorted` must be
// ascending and non-empty.
double quantile_sorted(std::span<const double> sorted, double p);
double quantile(std::vector<double> values, double p);

// Rank-normalized split R-hat. nullopt when all draws are identical
// (degenerate chains); a value is never fabricated in that case.
std::optional<double> split_rhat(const ChainSeries& chains);

// Effective sample size from split chains with Geyer's initial monotone
// sequence. Bulk uses rank-normalized draws; tail is the smaller of the ESS
// of the indicators x <= q5 and x <= q95.
std::optional<double> ess_bulk(const ChainSeries& chains);
std::optional<double> ess_tail(const ChainSeries& chains);

// ESS of the raw (untransformed) split chains.
std::optional<double> ess_raw(const ChainSeries& chains);

struct SummaryRow {
  std::string name;
  double mean = 0.0;
  double median = 0.0;
  double sd = 0.0;
  double mad = 0.0;  // scaled by 1.4826
  double q5 = 0.0;
  double q95 = 0.0;
  std::optional<double> rhat;
  std::optional<double> ess_bulk;
  std::optional<double> ess_tail;
};

using PosteriorSummary = std::vector<SummaryRow>;

inline constexpr std::array<const char*, 10> kSummaryColumns = {
    "variable", "mean", "median", "sd", "mad", "q5", "q95", "rhat", "ess_bulk", "ess_tail"};

// One row per parameter in Param order, over pooled post-warmup draws.
PosteriorSummary summarize(const ChainDraws& draws);

// Fixed-width text table, missing diagnostics printed as NA.
std::string format_summary_table(const PosteriorSummary& summary);

}  // namespace sirtd
