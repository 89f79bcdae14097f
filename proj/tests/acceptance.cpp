// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "sirtd/abm.hpp"
#include "sirtd/cli.hpp"
#include "sirtd/diagnostics.hpp"
#include "sirtd/model.hpp"
#include "sirtd/ode.hpp"

using namespace sirtd;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Result {
  bool pass = false;
  std::string detail;
};

SimConfig reference_sim() {
  SimConfig cfg;  // defaults are the reference configuration
  cfg.seed = 1;
  return cfg;
}

EpidemicParams truth(double phi) { return EpidemicParams{0.3, 0.1, 0.2, 7.0, 10.0, phi, phi}; }

Result criterion1() {
  const auto start = Clock::now();
  const SimOutput out = simulate(reference_sim());
  const double secs = seconds_since(start);
  bool conserved = true;
  for (const SimRow& r : out.rows) conserved = conserved && r.total() == 10000;
  std::ostringstream os;
  os << out.rows.size() << " rows, conserved=" << conserved << ", " << secs << " s";
  return {out.rows.size() == 70 && conserved && secs < 5.0, os.str()};
}

Result criterion2() {
  const auto start = Clock::now();
  const SolverConfig def;
  const VectorField decay = [](double, std::span<const double> y, std::span<double> dy) { dy[0] = -y[0]; };
  const std::vector<double> y0{1.0};
  const std::vector<double> t1{1.0};
  const double err = std::abs(integrate(decay, y0, 0.0, t1, def)[0][0] - std::exp(-1.0));

  std::vector<double> days(70);
  std::iota(days.begin(), days.end(), 0.0);
  const CompartmentState s0{9990, 10, 0, 0, 0};
  const Trajectory a = solve_sirtd(truth(1.0), s0, 10000, days, def);
  SolverConfig tight;
  tight.rtol = tight.atol = 1e-12;
  tight.max_steps = 1000000;
  const Trajectory b = solve_sirtd(truth(1.0), s0, 10000, days, tight);
  const double secs = seconds_since(start);

  double worst = 0.0;
  for (std::size_t i = 0; i < days.size(); ++i) {
    const auto x = a.states[i].to_array();
    const auto r = b.states[i].to_array();
    for (std::size_t k = 0; k < 5; ++k) {
      // Relative error, with the absolute tolerance as the floor for compartments near zero.
      worst = std::max(worst, std::abs(x[k] - r[k]) / std::max(std::abs(r[k]), def.atol / 1e-4));
    }
  }
  std::ostringstream os;
  os << "decay err " << err << ", SIRTD max rel err " << worst << ", " << secs << " s";
  return {err < 1e-6 && worst < 1e-4 && secs < 1.0, os.str()};
}

Result criterion3() {
  using Big = boost::multiprecision::cpp_bin_float_50;
  auto oracle = [](std::int64_t y, double mu, double disp) {
    const Big Y(y), M(mu), P(disp);
    const Big v = boost::multiprecision::lgamma(Y + P) - boost::multiprecision::lgamma(P) -
                  boost::multiprecision::lgamma(Y + 1) + P * (log(P) - log(M + P)) + Y * (log(M) - log(M + P));
    return static_cast<double>(v);
  };
  const std::int64_t ys[] = {0, 1, 3, 17, 250};
  const double mus[] = {0.01, 2.5, 40.0, 1e3};
  const double disps[] = {0.1, 1.0, 10.0, 1e2, 1e5};
  double worst = 0.0;
  int n = 0;
  for (auto y : ys) {
    for (double mu : mus) {
      for (double d : disps) {
        worst = std::max(worst, std::abs(nb2_log_pmf(y, mu, d) - oracle(y, mu, d)));
        ++n;
      }
    }
  }
  double worst_norm = 0.0;
  for (double mu : {0.5, 2.5, 10.0}) {
    for (double d : {1.0, 3.0, 20.0}) {
      double s = 0.0;
      for (std::int64_t y = 0; y <= 500; ++y) s += std::exp(nb2_log_pmf(y, mu, d));
      worst_norm = std::max(worst_norm, std::abs(s - 1.0));
    }
  }
  std::ostringstream os;
  os << n << "-point grid max abs err " << worst << ", normalization err " << worst_norm;
  return {n == 100 && worst < 1e-10 && worst_norm < 1e-8, os.str()};
}

FitContext synthetic_context(std::uint64_t data_seed) {
  const CompartmentState y0{9990, 10, 0, 0, 0};
  FitContext ctx;
  ctx.observed = simulate_observations(truth(0.1), y0, 10000, 70, SolverConfig{}, data_seed);
  return ctx;
}

Result criterion4() {
  const auto start = Clock::now();
  const std::uint64_t seeds[] = {11, 22, 33};
  const ParamVector t = truth(0.1).to_array();
  bool pass = true;
  std::ostringstream os;
  for (std::uint64_t seed : seeds) {
    SamplerConfig cfg;
    cfg.seed = seed;
    const ChainDraws draws = fit_posterior(synthetic_context(seed), cfg);
    const PosteriorSummary summary = summarize(draws);
    double max_rhat = 0.0;
    bool rhat_ok = true;
    for (const SummaryRow& r : summary) {
      rhat_ok = rhat_ok && r.rhat && *r.rhat <= 1.01;
      if (r.rhat) max_rhat = std::max(max_rhat, *r.rhat);
    }
    int covered = 0;
    for (std::size_t k = 0; k < 5; ++k) {
      covered += summary[k].q5 <= t[k] && t[k] <= summary[k].q95;
    }
    pass = pass && rhat_ok && covered >= 4;
    os << "seed " << seed << ": max rhat " << max_rhat << ", covered " << covered << "/5; ";
  }
  const double secs = seconds_since(start);
  os << secs << " s";
  return {pass && secs < 600.0, os.str()};
}

Result criterion5() {
  const SimOutput sim = simulate(reference_sim());
  FitContext ctx;
  ObservedData& obs = ctx.observed;
  obs.N = 10000;
  const SimRow& r0 = sim.rows.front();
  obs.y0 = {double(r0.S), double(r0.I), double(r0.R), double(r0.T), double(r0.D)};
  for (const SimRow& r : sim.rows) {
    obs.days.push_back(r.day);
    obs.cumulative_deaths.push_back(r.D);
    obs.tweet_counts.push_back(r.tweets);
  }
  SamplerConfig cfg;
  const ChainDraws draws = fit_posterior(ctx, cfg);
  const PredictiveTable pred = posterior_predictive(draws, ctx, 1);
  const auto& deaths = pred.channel("deaths").mean;
  const auto& tweets = pred.channel("tweets").mean;

  double se_d = 0, se_t = 0, peak_d = 0, peak_t = 0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    se_d += std::pow(deaths[i] - double(obs.cumulative_deaths[i]), 2);
    se_t += std::pow(tweets[i] - double(obs.tweet_counts[i]), 2);
    peak_d = std::max(peak_d, double(obs.cumulative_deaths[i]));
    peak_t = std::max(peak_t, double(obs.tweet_counts[i]));
  }
  const double rmse_d = std::sqrt(se_d / double(obs.size()));
  const double rmse_t = std::sqrt(se_t / double(obs.size()));
  std::ostringstream os;
  os << "deaths RMSE " << rmse_d << " (peak " << peak_d << "), tweets RMSE " << rmse_t << " (peak " << peak_t << ")";
  return {rmse_d <= 0.10 * peak_d && rmse_t <= 0.15 * peak_t, os.str()};
}

Result criterion6() {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> z;
  ChainSeries iid(4, std::vector<double>(1000));
  for (auto& c : iid) {
    for (double& x : c) x = z(rng);
  }
  ChainSeries separated(2, std::vector<double>(1000));
  for (std::size_t c = 0; c < 2; ++c) {
    for (double& x : separated[c]) x = z(rng) + 10.0 * double(c);
  }
  const auto rhat = split_rhat(iid);
  const auto ess = ess_bulk(iid);
  const auto rhat_sep = split_rhat(separated);
  std::ostringstream os;
  os << "iid rhat " << rhat.value_or(NAN) << ", ess_bulk " << ess.value_or(NAN) << ", separated rhat "
     << rhat_sep.value_or(NAN);
  const bool pass = rhat && *rhat >= 0.99 && *rhat <= 1.01 && ess && *ess >= 3200 && *ess <= 4800 && rhat_sep &&
                    *rhat_sep > 2.0;
  return {pass, os.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Result criterion7() {
  const fs::path root = fs::temp_directory_path() / ("sirtd_accept_" + std::to_string(::getpid()));
  fs::create_directories(root);
  {
    std::ofstream cfg(root / "run.cfg");
    cfg << "seed = 7\nsim.N = 10000\nsim.t = 70\nsim.I0 = 10\nmodel.I0 = 10\n"
        << "sampler.n_iterations = 400\nsampler.n_warmup = 200\nsampler.steps_per_iteration = 5\n";
  }
  std::ostringstream sink;
  auto run = [&](std::vector<std::string> args) { return run_cli(args, sink, sink); };
  const std::string cfg = (root / "run.cfg").string();
  bool ok = true;
  for (const char* tag : {"a", "b"}) {
    const fs::path sim = root / ("sim_" + std::string(tag));
    const fs::path fit = root / ("fit_" + std::string(tag));
    ok = ok && run({"simulate", "--config", cfg, "--out", sim.string()}) == kExitOk;
    ok = ok && run({"fit", "--config", cfg, "--deaths", (sim / "deaths.csv").string(), "--tweets",
                    (sim / "tweets.csv").string(), "--out", fit.string()}) == kExitOk;
  }
  bool same = ok;
  for (const char* f : {"sim.csv", "deaths.csv", "tweets.csv"}) {
    same = same && slurp(root / "sim_a" / f) == slurp(root / "sim_b" / f);
  }
  for (const char* f : {"draws.csv", "summary.csv", "summary.txt"}) {
    same = same && !slurp(root / "fit_a" / f).empty() && slurp(root / "fit_a" / f) == slurp(root / "fit_b" / f);
  }
  fs::remove_all(root);
  return {same, ok ? (same ? "outputs byte-identical" : "outputs differ") : "a command failed: " + sink.str()};
}

Result criterion8() {
  SimConfig cfg = reference_sim();
  cfg.omega = 0.5;
  double tweet_dev = 0, tweet_var = 0;
  std::int64_t to_T = 0, exits = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    cfg.seed = seed;
    const SimOutput out = simulate(cfg);
    for (std::size_t d = 1; d < out.rows.size(); ++d) {
      const SimRow& prev = out.rows[d - 1];
      const SimRow& cur = out.rows[d];
      const double I = double(prev.I);
      tweet_dev += double(cur.tweets) - cfg.lambda * I;
      tweet_var += I * cfg.lambda * (1.0 - cfg.lambda);
      // Entries to T equal the change in T plus departures to D.
      const std::int64_t new_T = (cur.T - prev.T) + (cur.D - prev.D);
      const std::int64_t new_R = cur.R - prev.R;
      to_T += new_T;
      exits += new_T + new_R;
    }
  }
  const double z_tweets = tweet_dev / std::sqrt(tweet_var);
  const double p = double(to_T) / double(exits);
  const double se = std::sqrt(0.5 * 0.5 / double(exits));
  const double z_route = (p - 0.5) / se;
  std::ostringstream os;
  os << "tweets z " << z_tweets << ", routing fraction " << p << " (z " << z_route << ", " << exits << " exits)";
  return {std::abs(z_tweets) < 3.0 && std::abs(z_route) < 3.0, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Result()>>> criteria = {
      {"1 ABM conservation and runtime", criterion1},
      {"2 integrator accuracy", criterion2},
      {"3 negative binomial oracle", criterion3},
      {"4 self-consistency recovery", criterion4},
      {"5 ABM trend replication", criterion5},
      {"6 diagnostics sanity", criterion6},
      {"7 CLI determinism", criterion7},
      {"8 ABM statistical properties", criterion8},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!only.empty() && !only.contains(int(i) + 1)) continue;
    Result r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    failures += !r.pass;
    std::cout << (r.pass ? "PASS" : "FAIL") << "  criterion " << criteria[i].first << ": " << r.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
