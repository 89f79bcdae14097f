#include "sirtd/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "sirtd/errors.hpp"
#include "sirtd/special.hpp"

namespace sirtd {

namespace {

void check_shape(const ChainSeries& chains) {
  if (chains.empty()) throw DomainError("diagnostics need at least one chain");
  const std::size_t n = chains.front().size();
  if (n < 4) throw DomainError("diagnostics need at least 4 draws per chain");
  for (const auto& c : chains) {
    if (c.size() != n) throw DomainError("diagnostics need chains of equal length");
  }
}

// Each chain cut into two halves; the middle draw of an odd-length chain is
// dropped.
ChainSeries split_chains(const ChainSeries& chains) {
  ChainSeries out;
  out.reserve(2 * chains.size());
  for (const auto& c : chains) {
    const std::size_t half = c.size() / 2;
    out.emplace_back(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(half));
    out.emplace_back(c.end() - static_cast<std::ptrdiff_t>(half), c.end());
  }
  return out;
}

bool all_identical(const ChainSeries& chains) {
  const double first = chains.front().front();
  for (const auto& c : chains) {
    for (double x : c) {
      if (x != first) return false;
    }
  }
  return true;
}

// Pooled average ranks mapped through the normal quantile function, with the
// Blom offset (r - 3/8) / (S + 1/4).
ChainSeries rank_normalize(const ChainSeries& chains) {
  std::vector<std::pair<double, std::size_t>> pooled;
  for (std::size_t c = 0; c < chains.size(); ++c) {
    for (std::size_t i = 0; i < chains[c].size(); ++i) pooled.emplace_back(chains[c][i], pooled.size());
  }
  const std::size_t total = pooled.size();
  std::sort(pooled.begin(), pooled.end());
  std::vector<double> z(total);
  for (std::size_t i = 0; i < total;) {
    std::size_t j = i;
    while (j + 1 < total && pooled[j + 1].first == pooled[i].first) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    const double value =
        special::normal_quantile((avg_rank - 0.375) / (static_cast<double>(total) + 0.25));
    for (std::size_t k = i; k <= j; ++k) z[pooled[k].second] = value;
    i = j + 1;
  }
  ChainSeries out;
  std::size_t pos = 0;
  for (const auto& c : chains) {
    out.emplace_back(z.begin() + static_cast<std::ptrdiff_t>(pos),
                     z.begin() + static_cast<std::ptrdiff_t>(pos + c.size()));
    pos += c.size();
  }
  return out;
}

// Shifted by the first value, which keeps a constant sample's mean exact.
double mean_of(const std::vector<double>& v) {
  const double shift = v.front();
  double s = 0.0;
  for (double x : v) s += x - shift;
  return shift + s / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return ss / static_cast<double>(v.size() - 1);
}

std::optional<double> rhat_core(const ChainSeries& chains) {
  const double n = static_cast<double>(chains.front().size());
  std::vector<double> means, vars;
  for (const auto& c : chains) {
    means.push_back(mean_of(c));
    vars.push_back(sample_variance(c));
  }
  const double w = mean_of(vars);
  const double b_over_n = chains.size() > 1 ? sample_variance(means) : 0.0;
  const double var_plus = (n - 1.0) / n * w + b_over_n;
  if (var_plus <= 0.0) return std::nullopt;
  if (w <= 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(var_plus / w);
}

// Multi-chain ESS with Geyer's initial positive sequence turned into an
// initial monotone sequence.
std::optional<double> ess_core(const ChainSeries& chains) {
  const std::size_t m = chains.size();
  const std::size_t n = chains.front().size();
  const double nd = static_cast<double>(n);

  std::vector<double> chain_mean(m);
  for (std::size_t c = 0; c < m; ++c) chain_mean[c] = mean_of(chains[c]);

  // Biased autocovariance of every chain at `lag`, averaged over chains.
  auto mean_acov = [&](std::size_t lag) {
    double total = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      const auto& x = chains[c];
      double s = 0.0;
      for (std::size_t i = 0; i + lag < n; ++i) s += (x[i] - chain_mean[c]) * (x[i + lag] - chain_mean[c]);
      total += s / nd;
    }
    return total / static_cast<double>(m);
  };

  const double mean_var = mean_acov(0) * nd / (nd - 1.0);
  double var_plus = mean_var * (nd - 1.0) / nd;
  if (m > 1) var_plus += sample_variance(chain_mean);
  if (!(var_plus > 0.0)) return std::nullopt;

  auto rho = [&](std::size_t lag) { return 1.0 - (mean_var - mean_acov(lag)) / var_plus; };

  std::vector<double> rho_hat(n + 2, 0.0);
  double rho_even = 1.0;
  double rho_odd = rho(1);
  rho_hat[0] = rho_even;
  rho_hat[1] = rho_odd;

  std::size_t s = 1;
  while (s + 4 < n && rho_even + rho_odd > 0.0) {
    rho_even = rho(s + 1);
    rho_odd = rho(s + 2);
    if (rho_even + rho_odd >= 0.0) {
      rho_hat[s + 1] = rho_even;
      rho_hat[s + 2] = rho_odd;
    }
    s += 2;
  }
  const std::size_t max_s = s;
  if (rho_even > 0.0) rho_hat[max_s + 1] = rho_even;

  for (std::size_t t = 1; t + 3 <= max_s; t += 2) {
    if (rho_hat[t + 1] + rho_hat[t + 2] > rho_hat[t - 1] + rho_hat[t]) {
      rho_hat[t + 1] = 0.5 * (rho_hat[t - 1] + rho_hat[t]);
      rho_hat[t + 2] = rho_hat[t + 1];
    }
  }

  const double total = static_cast<double>(m) * nd;
  double tau = -1.0 + rho_hat[max_s + 1];
  for (std::size_t t = 0; t < max_s; ++t) tau += 2.0 * rho_hat[t];
  return std::min(total / tau, total * std::log10(total));
}

std::optional<double> indicator_ess(const ChainSeries& split, double threshold) {
  ChainSeries ind;
  for (const auto& c : split) {
    std::vector<double> v(c.size());
    std::transform(c.begin(), c.end(), v.begin(), [threshold](double x) { return x <= threshold ? 1.0 : 0.0; });
    ind.push_back(std::move(v));
  }
  if (all_identical(ind)) return std::nullopt;
  return ess_core(ind);
}

}  // namespace

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DomainError("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double quantile(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  return quantile_sorted(values, p);
}

std::optional<double> split_rhat(const ChainSeries& chains) {
  check_shape(chains);
  if (all_identical(chains)) return std::nullopt;
  return rhat_core(rank_normalize(split_chains(chains)));
}

std::optional<double> ess_bulk(const ChainSeries& chains) {
  check_shape(chains);
  if (all_identical(chains)) return std::nullopt;
  return ess_core(rank_normalize(split_chains(chains)));
}

std::optional<double> ess_raw(const ChainSeries& chains) {
  check_shape(chains);
  if (all_identical(chains)) return std::nullopt;
  return ess_core(split_chains(chains));
}

std::optional<double> ess_tail(const ChainSeries& chains) {
  check_shape(chains);
  if (all_identical(chains)) return std::nullopt;
  std::vector<double> pooled;
  for (const auto& c : chains) pooled.insert(pooled.end(), c.begin(), c.end());
  std::sort(pooled.begin(), pooled.end());
  const ChainSeries split = split_chains(chains);
  const auto lower = indicator_ess(split, quantile_sorted(pooled, 0.05));
  const auto upper = indicator_ess(split, quantile_sorted(pooled, 0.95));
  if (!lower || !upper) return std::nullopt;
  return std::min(*lower, *upper);
}

PosteriorSummary summarize(const ChainDraws& draws) {
  PosteriorSummary out;
  for (std::size_t j = 0; j < kNumParams; ++j) {
    const auto p = static_cast<Param>(j);
    std::vector<double> v = draws.pooled(p);
    if (v.empty()) throw DomainError("summarize needs at least one draw");
    SummaryRow row;
    row.name = std::string(kParamNames[j]);
    row.mean = mean_of(v);
    row.sd = std::sqrt(sample_variance(v));
    std::sort(v.begin(), v.end());
    row.median = quantile_sorted(v, 0.5);
    row.q5 = quantile_sorted(v, 0.05);
    row.q95 = quantile_sorted(v, 0.95);
    std::vector<double> dev(v.size());
    std::transform(v.begin(), v.end(), dev.begin(), [&](double x) { return std::abs(x - row.median); });
    std::sort(dev.begin(), dev.end());
    row.mad = 1.4826 * quantile_sorted(dev, 0.5);

    if (draws.n_draws() >= 4) {
      const ChainSeries chains = draws.per_chain(p);
      row.rhat = split_rhat(chains);
      row.ess_bulk = ess_bulk(chains);
      row.ess_tail = ess_tail(chains);
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::string format_summary_table(const PosteriorSummary& summary) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-11s %10s %10s %10s %10s %10s %10s %7s %9s %9s\n", kSummaryColumns[0],
                kSummaryColumns[1], kSummaryColumns[2], kSummaryColumns[3], kSummaryColumns[4], kSummaryColumns[5],
                kSummaryColumns[6], kSummaryColumns[7], kSummaryColumns[8], kSummaryColumns[9]);
  os << buf;
  auto opt = [](const std::optional<double>& v, const char* fmt) {
    char b[32];
    if (!v) return std::string("NA");
    std::snprintf(b, sizeof b, fmt, *v);
    return std::string(b);
  };
  for (const SummaryRow& r : summary) {
    std::snprintf(buf, sizeof buf, "%-11s %10.4f %10.4f %10.4f %10.4f %10.4f %10.4f %7s %9s %9s\n", r.name.c_str(),
                  r.mean, r.median, r.sd, r.mad, r.q5, r.q95, opt(r.rhat, "%.3f").c_str(),
                  opt(r.ess_bulk, "%.1f").c_str(), opt(r.ess_tail, "%.1f").c_str());
    os << buf;
  }
  return os.str();
}

}  // namespace sirtd
