#include "sirtd/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "sirtd/errors.hpp"
#include "sirtd/io.hpp"

namespace sirtd {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "seed",
      "sim.N", "sim.t", "sim.C", "sim.beta", "sim.omega", "sim.lambda", "sim.d_I", "sim.d_T", "sim.I0",
      "sim.infection_mode", "sim.start_date",
      "model.N", "model.I0", "model.cases", "model.n_days",
      "init.S", "init.I", "init.R", "init.T", "init.D",
      "priors.mu_beta", "priors.sigma_beta", "priors.omega_family", "priors.mu_omega", "priors.sigma_omega",
      "priors.alpha_omega", "priors.beta_omega", "priors.alpha_lambda", "priors.beta_lambda", "priors.mu_dI",
      "priors.sigma_dI", "priors.mu_dT", "priors.sigma_dT", "priors.rate_phi", "priors.rate_phi_tweets",
      "solver.rtol", "solver.atol", "solver.max_steps",
      "sampler.n_chains", "sampler.n_iterations", "sampler.n_warmup", "sampler.target_accept",
      "sampler.steps_per_iteration", "sampler.full_covariance", "sampler.initial_scale", "sampler.parallel",
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T>
void assign(T& target, const std::optional<T>& v) {
  if (v) target = *v;
}

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text, const std::string& origin) {
  ConfigFile cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(origin + ": expected 'key = value'", line_no);
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (!known_keys().contains(key)) throw InvalidConfig(origin + ": unknown key '" + key + "' (line " +
                                                         std::to_string(line_no) + ")");
    if (cfg.values_.contains(key)) throw InvalidConfig(origin + ": duplicate key '" + key + "'");
    cfg.values_[key] = value;
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  ConfigFile cfg = parse(ss.str(), path.string());
  cfg.base_dir_ = path.parent_path();
  return cfg;
}

std::optional<std::string> ConfigFile::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> ConfigFile::number(const std::string& key) const {
  const auto t = text(key);
  if (!t) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t->data(), t->data() + t->size(), v);
  if (ec != std::errc() || ptr != t->data() + t->size()) {
    throw InvalidConfig(origin_ + ": " + key + " = '" + *t + "' is not a number");
  }
  return v;
}

std::optional<std::int64_t> ConfigFile::integer(const std::string& key) const {
  const auto t = text(key);
  if (!t) return std::nullopt;
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t->data(), t->data() + t->size(), v);
  if (ec != std::errc() || ptr != t->data() + t->size()) {
    // Accept integral floating forms such as 1e4.
    const auto d = number(key);
    if (*d != static_cast<double>(static_cast<std::int64_t>(*d))) {
      throw InvalidConfig(origin_ + ": " + key + " = '" + *t + "' is not an integer");
    }
    return static_cast<std::int64_t>(*d);
  }
  return v;
}

std::optional<bool> ConfigFile::boolean(const std::string& key) const {
  const auto t = text(key);
  if (!t) return std::nullopt;
  if (*t == "true" || *t == "1" || *t == "yes") return true;
  if (*t == "false" || *t == "0" || *t == "no") return false;
  throw InvalidConfig(origin_ + ": " + key + " = '" + *t + "' is not a boolean");
}

RunConfig RunConfig::from(const ConfigFile& f) {
  RunConfig rc;
  if (auto s = f.integer("seed")) {
    if (*s < 0) throw InvalidConfig("seed must be non-negative");
    rc.seed = static_cast<std::uint64_t>(*s);
  }

  SimConfig& sim = rc.sim;
  assign(sim.N, f.integer("sim.N"));
  if (auto v = f.integer("sim.t")) sim.t = static_cast<int>(*v);
  if (auto v = f.integer("sim.C")) sim.C = static_cast<int>(*v);
  assign(sim.beta, f.number("sim.beta"));
  assign(sim.omega, f.number("sim.omega"));
  assign(sim.lambda, f.number("sim.lambda"));
  assign(sim.d_I, f.number("sim.d_I"));
  assign(sim.d_T, f.number("sim.d_T"));
  assign(sim.I0, f.integer("sim.I0"));
  if (auto m = f.text("sim.infection_mode")) {
    if (*m == "scaled") {
      sim.infection_mode = InfectionMode::per_contact_scaled;
    } else if (*m == "literal") {
      sim.infection_mode = InfectionMode::per_contact_literal;
    } else {
      throw InvalidConfig("sim.infection_mode must be 'scaled' or 'literal'");
    }
  }
  assign(rc.start_date, f.text("sim.start_date"));
  io::parse_date(rc.start_date);

  PriorConfig& p = rc.priors;
  assign(p.mu_beta, f.number("priors.mu_beta"));
  assign(p.sigma_beta, f.number("priors.sigma_beta"));
  if (auto fam = f.text("priors.omega_family")) {
    if (*fam == "truncated_normal") {
      p.omega_family = OmegaPrior::truncated_normal;
    } else if (*fam == "beta") {
      p.omega_family = OmegaPrior::beta;
    } else {
      throw InvalidConfig("priors.omega_family must be 'truncated_normal' or 'beta'");
    }
  }
  assign(p.mu_omega, f.number("priors.mu_omega"));
  assign(p.sigma_omega, f.number("priors.sigma_omega"));
  assign(p.alpha_omega, f.number("priors.alpha_omega"));
  assign(p.beta_omega, f.number("priors.beta_omega"));
  assign(p.alpha_lambda, f.number("priors.alpha_lambda"));
  assign(p.beta_lambda, f.number("priors.beta_lambda"));
  assign(p.mu_dI, f.number("priors.mu_dI"));
  assign(p.sigma_dI, f.number("priors.sigma_dI"));
  assign(p.mu_dT, f.number("priors.mu_dT"));
  assign(p.sigma_dT, f.number("priors.sigma_dT"));
  assign(p.rate_phi, f.number("priors.rate_phi"));
  assign(p.rate_phi_tweets, f.number("priors.rate_phi_tweets"));
  p.validate();

  assign(rc.solver.rtol, f.number("solver.rtol"));
  assign(rc.solver.atol, f.number("solver.atol"));
  if (auto v = f.integer("solver.max_steps")) rc.solver.max_steps = static_cast<long>(*v);
  rc.solver.validate();

  SamplerConfig& s = rc.sampler;
  if (auto v = f.integer("sampler.n_chains")) s.n_chains = static_cast<int>(*v);
  if (auto v = f.integer("sampler.n_iterations")) s.n_iterations = static_cast<int>(*v);
  if (auto v = f.integer("sampler.n_warmup")) s.n_warmup = static_cast<int>(*v);
  assign(s.target_accept, f.number("sampler.target_accept"));
  if (auto v = f.integer("sampler.steps_per_iteration")) s.steps_per_iteration = static_cast<int>(*v);
  assign(s.full_covariance, f.boolean("sampler.full_covariance"));
  assign(s.initial_scale, f.number("sampler.initial_scale"));
  assign(s.parallel, f.boolean("sampler.parallel"));
  s.validate();

  ModelSetup& m = rc.model;
  if (auto v = f.number("model.N")) {
    m.N = *v;
  } else if (f.has("sim.N")) {
    m.N = static_cast<double>(sim.N);
  }
  if (m.N && !(*m.N > 0.0)) throw InvalidConfig("model.N must be > 0");

  const bool has_init = f.has("init.S") || f.has("init.I") || f.has("init.R") || f.has("init.T") || f.has("init.D");
  if (has_init) {
    CompartmentState y0{f.number("init.S").value_or(0.0), f.number("init.I").value_or(0.0),
                        f.number("init.R").value_or(0.0), f.number("init.T").value_or(0.0),
                        f.number("init.D").value_or(0.0)};
    if (!f.has("init.S") && m.N) y0.S = *m.N - y0.I - y0.R - y0.T - y0.D;
    m.y0 = y0;
  } else {
    std::optional<double> I0 = f.number("model.I0");
    if (!I0 && f.has("sim.I0")) I0 = static_cast<double>(sim.I0);
    if (I0 && m.N) m.y0 = CompartmentState{*m.N - *I0, *I0, 0.0, 0.0, 0.0};
  }
  if (m.y0 && m.N && std::abs(m.y0->total() - *m.N) > 1e-9 * *m.N) {
    throw InvalidConfig("initial state does not sum to model.N");
  }
  if (auto c = f.text("model.cases")) {
    std::filesystem::path path(*c);
    m.cases = path.is_absolute() ? path : f.base_dir() / path;
  }
  if (auto n = f.integer("model.n_days")) {
    if (*n < 1) throw InvalidConfig("model.n_days must be >= 1");
    m.n_days = static_cast<int>(*n);
  }
  return rc;
}

std::string RunConfig::echo() const {
  using io::format_double;
  std::ostringstream os;
  if (seed) os << "seed = " << *seed << '\n';
  os << "sim.N = " << sim.N << "\nsim.t = " << sim.t << "\nsim.C = " << sim.C << "\nsim.beta = "
     << format_double(sim.beta) << "\nsim.omega = " << format_double(sim.omega)
     << "\nsim.lambda = " << format_double(sim.lambda) << "\nsim.d_I = " << format_double(sim.d_I)
     << "\nsim.d_T = " << format_double(sim.d_T) << "\nsim.I0 = " << sim.I0 << "\nsim.infection_mode = "
     << (sim.infection_mode == InfectionMode::per_contact_scaled ? "scaled" : "literal")
     << "\nsim.start_date = " << start_date << '\n';
  if (model.N) os << "model.N = " << format_double(*model.N) << '\n';
  if (model.y0) {
    os << "init.S = " << format_double(model.y0->S) << "\ninit.I = " << format_double(model.y0->I)
       << "\ninit.R = " << format_double(model.y0->R) << "\ninit.T = " << format_double(model.y0->T)
       << "\ninit.D = " << format_double(model.y0->D) << '\n';
  }
  if (model.cases) os << "model.cases = " << model.cases->string() << '\n';
  if (model.n_days) os << "model.n_days = " << *model.n_days << '\n';
  os << "priors.mu_beta = " << format_double(priors.mu_beta) << "\npriors.sigma_beta = "
     << format_double(priors.sigma_beta) << "\npriors.omega_family = "
     << (priors.omega_family == OmegaPrior::truncated_normal ? "truncated_normal" : "beta")
     << "\npriors.mu_omega = " << format_double(priors.mu_omega) << "\npriors.sigma_omega = "
     << format_double(priors.sigma_omega) << "\npriors.alpha_omega = " << format_double(priors.alpha_omega)
     << "\npriors.beta_omega = " << format_double(priors.beta_omega)
     << "\npriors.alpha_lambda = " << format_double(priors.alpha_lambda)
     << "\npriors.beta_lambda = " << format_double(priors.beta_lambda) << "\npriors.mu_dI = "
     << format_double(priors.mu_dI) << "\npriors.sigma_dI = " << format_double(priors.sigma_dI)
     << "\npriors.mu_dT = " << format_double(priors.mu_dT) << "\npriors.sigma_dT = "
     << format_double(priors.sigma_dT) << "\npriors.rate_phi = " << format_double(priors.rate_phi)
     << "\npriors.rate_phi_tweets = " << format_double(priors.rate_phi_tweets) << '\n';
  os << "solver.rtol = " << format_double(solver.rtol) << "\nsolver.atol = " << format_double(solver.atol)
     << "\nsolver.max_steps = " << solver.max_steps << '\n';
  os << "sampler.n_chains = " << sampler.n_chains << "\nsampler.n_iterations = " << sampler.n_iterations
     << "\nsampler.n_warmup = " << sampler.n_warmup << "\nsampler.target_accept = "
     << format_double(sampler.target_accept) << "\nsampler.steps_per_iteration = " << sampler.steps_per_iteration
     << "\nsampler.full_covariance = " << (sampler.full_covariance ? "true" : "false")
     << "\nsampler.initial_scale = " << format_double(sampler.initial_scale)
     << "\nsampler.parallel = " << (sampler.parallel ? "true" : "false") << '\n';
  return os.str();
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> cli_seed, std::optional<std::uint64_t> config_seed) {
  if (const char* env = std::getenv("SIRTD_SEED"); env != nullptr && *env != '\0') {
    std::uint64_t v = 0;
    const std::string s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw InvalidConfig("SIRTD_SEED = '" + s + "' is not a non-negative integer");
    }
    return v;
  }
  if (cli_seed) return *cli_seed;
  if (config_seed) return *config_seed;
  return 1;
}

}  // namespace sirtd
