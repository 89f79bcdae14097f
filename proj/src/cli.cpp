#include "sirtd/cli.hpp"

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "sirtd/config.hpp"
#include "sirtd/diagnostics.hpp"
#include "sirtd/errors.hpp"
#include "sirtd/io.hpp"
#include "sirtd/model.hpp"

namespace sirtd {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string deaths;
  std::string tweets;
  std::string draws;
  std::optional<std::uint64_t> seed;
};

void require_file(const std::string& path, const char* what) {
  if (!fs::is_regular_file(path)) throw ValidationError(std::string(what) + " file not found: " + path);
}

void write_manifest(const fs::path& dir, const std::string& command, std::uint64_t seed, const std::string& config_echo,
                    const std::vector<std::pair<std::string, std::string>>& inputs) {
  std::ostringstream os;
  os << "command = " << command << "\nseed = " << seed << "\nsirtd_version = " << kVersion
     << "\ncompiler = " << __VERSION__ << "\ncxx_standard = " << __cplusplus << '\n';
  for (const auto& [k, v] : inputs) os << "input." << k << " = " << v << '\n';
  os << "\n# resolved configuration\n" << config_echo;
  io::write_file_atomic(dir / "manifest.txt", os.str());
}

FitContext build_context(const RunConfig& rc, const io::ObservationSeries& series) {
  if (!rc.model.N) throw InvalidConfig("model.N (population size) is required");
  const double N = *rc.model.N;
  CompartmentState y0;
  if (rc.model.cases) {
    require_file(rc.model.cases->string(), "cases");
    y0 = io::initial_state_from_cases(*rc.model.cases, series.dates.front(), N, series.cumulative_deaths.front());
  } else if (rc.model.y0) {
    y0 = *rc.model.y0;
  } else {
    throw InvalidConfig("initial state needed: set init.*, model.I0 or model.cases");
  }
  FitContext ctx{io::make_observed(series, N, y0), rc.priors, rc.solver};
  ctx.validate();
  return ctx;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const RunConfig rc = RunConfig::from(ConfigFile::load(o.config));
  SimConfig sim = rc.sim;
  sim.seed = resolve_seed(o.seed, rc.seed);
  const SimOutput result = simulate(sim);

  const fs::path dir(o.out);
  io::write_sim_csv(result, dir / "sim.csv");
  io::write_sim_observations(result, rc.start_date, dir / "deaths.csv", dir / "tweets.csv");
  write_manifest(dir, "simulate", sim.seed, rc.echo(), {{"config", o.config}});
  const SimRow& last = result.rows.back();
  out << "simulated " << result.rows.size() << " days: final S=" << last.S << " I=" << last.I << " R=" << last.R
      << " T=" << last.T << " D=" << last.D << "\n";
  return kExitOk;
}

int cmd_fit(const Options& o, std::ostream& out) {
  require_file(o.deaths, "deaths");
  require_file(o.tweets, "tweets");
  const RunConfig rc = RunConfig::from(ConfigFile::load(o.config));
  const std::uint64_t seed = resolve_seed(o.seed, rc.seed);
  const io::ObservationSeries series = io::read_observed_csv(o.deaths, o.tweets);
  const FitContext ctx = build_context(rc, series);

  SamplerConfig sampler = rc.sampler;
  sampler.seed = seed;
  const ChainDraws draws = fit_posterior(ctx, sampler);
  const PosteriorSummary summary = summarize(draws);
  const PredictiveTable predictive = posterior_predictive(draws, ctx, seed);

  const fs::path dir(o.out);
  io::write_draws_csv(draws, dir / "draws.csv");
  io::write_summary_csv(summary, dir / "summary.csv");
  const std::string table = format_summary_table(summary);
  io::write_file_atomic(dir / "summary.txt", table);
  io::write_overlay_csv(ctx.observed, predictive, dir / "overlay.csv");
  write_manifest(dir, "fit", seed, rc.echo(), {{"config", o.config}, {"deaths", o.deaths}, {"tweets", o.tweets}});

  out << table;
  for (std::size_t c = 0; c < draws.n_chains(); ++c) {
    out << "chain " << c + 1 << " acceptance " << draws.chains[c].acceptance_rate << "\n";
  }
  return kExitOk;
}

int cmd_summarize(const Options& o, std::ostream& out) {
  require_file(o.draws, "draws");
  const ChainDraws draws = io::read_draws_csv(o.draws);
  const PosteriorSummary summary = summarize(draws);
  if (!o.out.empty()) io::write_summary_csv(summary, fs::path(o.out) / "summary.csv");
  out << format_summary_table(summary);
  return kExitOk;
}

int cmd_predict(const Options& o, std::ostream& out) {
  require_file(o.draws, "draws");
  const RunConfig rc = RunConfig::from(ConfigFile::load(o.config));
  const std::uint64_t seed = resolve_seed(o.seed, rc.seed);
  const ChainDraws draws = io::read_draws_csv(o.draws);

  FitContext ctx;
  if (!o.deaths.empty() || !o.tweets.empty()) {
    require_file(o.deaths, "deaths");
    require_file(o.tweets, "tweets");
    ctx = build_context(rc, io::read_observed_csv(o.deaths, o.tweets));
  } else {
    if (!rc.model.n_days) throw InvalidConfig("predict needs --deaths/--tweets or model.n_days");
    io::ObservationSeries grid;
    for (int d = 0; d < *rc.model.n_days; ++d) {
      grid.dates.push_back(io::format_date(io::parse_date(rc.start_date) + d));
      grid.days.push_back(d);
      grid.cumulative_deaths.push_back(0);
      grid.tweet_counts.push_back(0);
    }
    if (rc.model.cases) throw InvalidConfig("model.cases needs observed deaths; pass --deaths/--tweets");
    ctx = build_context(rc, grid);
  }

  const PredictiveTable table = posterior_predictive(draws, ctx, seed);
  const fs::path dir(o.out);
  io::write_predictive_csv(table, dir / "predictive.csv");
  write_manifest(dir, "predict", seed, rc.echo(), {{"config", o.config}, {"draws", o.draws}});
  out << "predictive bands over " << table.days.size() << " days from " << table.n_used << " draws";
  if (table.n_skipped > 0) out << " (" << table.n_skipped << " skipped after solver failure)";
  out << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"SIRTD epidemic simulation, Bayesian fitting and diagnostics", "sirtd"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Options o;

  auto add_seed = [&o](CLI::App* cmd) {
    cmd->add_option("--seed", o.seed, "Overrides the config seed (SIRTD_SEED overrides both)");
  };

  CLI::App* sim = app.add_subcommand("simulate", "Run the agent-based simulation");
  sim->add_option("--config", o.config, "Configuration file")->required();
  sim->add_option("--out", o.out, "Output directory")->required();
  add_seed(sim);

  CLI::App* fit = app.add_subcommand("fit", "Fit the SIRTD model to deaths and tweets");
  fit->add_option("--config", o.config, "Configuration file")->required();
  fit->add_option("--deaths", o.deaths, "CSV with date,cumulative_deaths")->required();
  fit->add_option("--tweets", o.tweets, "CSV with date,symptom_tweet_count")->required();
  fit->add_option("--out", o.out, "Output directory")->required();
  add_seed(fit);

  CLI::App* summ = app.add_subcommand("summarize", "Posterior summary and convergence diagnostics of a draws file");
  summ->add_option("--draws", o.draws, "draws.csv written by fit")->required();
  summ->add_option("--out", o.out, "Optional directory for summary.csv");

  CLI::App* pred = app.add_subcommand("predict", "Posterior predictive bands");
  pred->add_option("--draws", o.draws, "draws.csv written by fit")->required();
  pred->add_option("--config", o.config, "Configuration file")->required();
  pred->add_option("--out", o.out, "Output directory")->required();
  pred->add_option("--deaths", o.deaths, "Observed deaths (sets the day grid and initial state)");
  pred->add_option("--tweets", o.tweets, "Observed tweets");
  add_seed(pred);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sim->parsed()) return cmd_simulate(o, out);
    if (fit->parsed()) return cmd_fit(o, out);
    if (summ->parsed()) return cmd_summarize(o, out);
    if (pred->parsed()) return cmd_predict(o, out);
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace sirtd
