#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "sirtd/abm.hpp"
#include "sirtd/core.hpp"
#include "sirtd/mcmc.hpp"
#include "sirtd/ode.hpp"

namespace sirtd {

/// Flat `key = value` configuration with dotted keys (`sim.N`,
/// `priors.mu_beta`, `sampler.n_chains`, ...). `#` starts a comment. Unknown
/// keys are rejected so that typos do not silently fall back to defaults.
class ConfigFile {
 public:
  static ConfigFile parse(const std::string& text, const std::string& origin = "<config>");
  static ConfigFile load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.contains(key); }
  const std::map<std::string, std::string>& values() const { return values_; }
  const std::filesystem::path& base_dir() const { return base_dir_; }

  std::optional<double> number(const std::string& key) const;
  std::optional<std::int64_t> integer(const std::string& key) const;
  std::optional<bool> boolean(const std::string& key) const;
  std::optional<std::string> text(const std::string& key) const;

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

 private:
  std::map<std::string, std::string> values_;
  std::filesystem::path base_dir_;
  std::string origin_;
};

struct ModelSetup {
  std::optional<double> N;                // model.N, falling back to sim.N
  std::optional<CompartmentState> y0;     // init.* or model.I0
  std::optional<std::filesystem::path> cases;  // model.cases
  std::optional<int> n_days;              // model.n_days, for predict without data
};

/// Typed views of one configuration. Each throws InvalidConfig when a value
/// is malformed or violates the target type's invariants.
struct RunConfig {
  std::optional<std::uint64_t> seed;
  SimConfig sim;
  std::string start_date = "2020-01-01";
  PriorConfig priors;
  SolverConfig solver;
  SamplerConfig sampler;
  ModelSetup model;

  static RunConfig from(const ConfigFile& file);
  // Canonical key = value rendering of every resolved field.
  std::string echo() const;
};

// Resolution order: SIRTD_SEED environment variable, then the --seed flag,
// then the config file, then 1.
std::uint64_t resolve_seed(std::optional<std::uint64_t> cli_seed, std::optional<std::uint64_t> config_seed);

}  // namespace sirtd
