#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "sirtd/model.hpp"

namespace sirtd::testing {

inline EpidemicParams truth(double phi = 0.1) { return {0.3, 0.1, 0.2, 7.0, 10.0, phi, phi}; }

inline CompartmentState reference_y0() { return {9990, 10, 0, 0, 0}; }

// Deaths and tweets drawn from the model at the reference parameters.
inline FitContext model_fixture(std::uint64_t seed) {
  FitContext ctx;
  ctx.observed = simulate_observations(truth(), reference_y0(), 10000, 70, SolverConfig{}, seed);
  return ctx;
}

// A shorter run than the defaults; shared by the tests that need a posterior.
inline const ChainDraws& fixture_fit() {
  static const ChainDraws draws = [] {
    SamplerConfig cfg;
    cfg.n_iterations = 1000;
    cfg.n_warmup = 500;
    cfg.steps_per_iteration = 20;
    cfg.seed = 3;
    return fit_posterior(model_fixture(3), cfg);
  }();
  return draws;
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("sirtd_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace sirtd::testing
