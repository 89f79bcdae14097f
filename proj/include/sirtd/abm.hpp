#pragma once

#include <cstdint>
#include <vector>

namespace sirtd {

enum class InfectionMode {
  // Each contact infects a susceptible target with probability beta / C, so an
  // infected agent in a fully susceptible population causes beta new
  // infections per day on average.
  per_contact_scaled,
  // Each contact infects with probability beta, as written in the original
  // pseudo-code.
  per_contact_literal,
};

struct SimConfig {
  std::int64_t N = 10000;
  int t = 70;         // number of rows, including the initial state
  int C = 10;         // daily contacts per infected agent
  double beta = 0.3;
  double omega = 0.1;
  double lambda = 0.2;
  double d_I = 7.0;
  double d_T = 10.0;
  std::int64_t I0 = 10;
  std::uint64_t seed = 1;
  InfectionMode infection_mode = InfectionMode::per_contact_scaled;

  // Throws InvalidConfig.
  void validate() const;
};

struct SimRow {
  int day = 0;
  std::int64_t S = 0, I = 0, R = 0, T = 0, D = 0;
  std::int64_t tweets = 0;

  std::int64_t total() const noexcept { return S + I + R + T + D; }
  friend bool operator==(const SimRow&, const SimRow&) = default;
};

struct SimOutput {
  std::vector<SimRow> rows;

  // Throws InvariantViolation if a row breaks conservation against N (the
  // first row's total when N <= 0), D decreases, or tweets exceed the
  // previous day's I.
  void validate(std::int64_t N = 0) const;
  friend bool operator==(const SimOutput&, const SimOutput&) = default;
};

/// Agent-based SIRTD-with-tweets process. Row 0 is the initial state; each
/// later row applies one day of transitions computed against the state at the
/// start of that day, so agents infected today start transmitting tomorrow.
SimOutput simulate(const SimConfig& cfg);

}  // namespace sirtd
