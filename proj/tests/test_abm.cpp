#include <doctest.h>

#include <cmath>

#include "sirtd/abm.hpp"
#include "sirtd/errors.hpp"

using namespace sirtd;

TEST_CASE("reference simulation conserves the population and has an epidemic") {
  const SimOutput out = simulate(SimConfig{});
  REQUIRE(out.rows.size() == 70);
  CHECK_NOTHROW(out.validate(10000));
  const SimRow& first = out.rows.front();
  CHECK(first == SimRow{0, 9990, 10, 0, 0, 0, 0});
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    CHECK(out.rows[i].total() == 10000);
    CHECK(out.rows[i].day == static_cast<int>(i));
  }
  CHECK(out.rows.back().R + out.rows.back().D > 10);
}

TEST_CASE("no transmission keeps S constant") {
  SimConfig cfg;
  cfg.beta = 0.0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    cfg.seed = seed;
    for (const SimRow& r : simulate(cfg).rows) CHECK(r.S == cfg.N - cfg.I0);
  }
}

TEST_CASE("no terminal path keeps T and D at zero") {
  SimConfig cfg;
  cfg.omega = 0.0;
  for (const SimRow& r : simulate(cfg).rows) {
    CHECK(r.T == 0);
    CHECK(r.D == 0);
  }
}

TEST_CASE("identical seeds give identical output, different seeds differ") {
  SimConfig cfg;
  cfg.seed = 42;
  CHECK(simulate(cfg) == simulate(cfg));
  SimConfig other = cfg;
  other.seed = 43;
  CHECK_FALSE(simulate(cfg) == simulate(other));
}

TEST_CASE("literal per-contact mode transmits faster") {
  SimConfig scaled;
  scaled.beta = 0.05;
  SimConfig literal = scaled;
  literal.infection_mode = InfectionMode::per_contact_literal;
  CHECK(simulate(literal).rows.back().S < simulate(scaled).rows.back().S);
}

TEST_CASE("routing to T matches omega within three standard errors") {
  SimConfig cfg;
  cfg.omega = 0.5;
  std::int64_t to_T = 0, exits = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    cfg.seed = seed;
    const SimOutput out = simulate(cfg);
    for (std::size_t d = 1; d < out.rows.size(); ++d) {
      const SimRow& a = out.rows[d - 1];
      const SimRow& b = out.rows[d];
      const std::int64_t new_T = (b.T - a.T) + (b.D - a.D);
      to_T += new_T;
      exits += new_T + (b.R - a.R);
    }
  }
  const double p = double(to_T) / double(exits);
  CHECK(std::abs(p - 0.5) < 3.0 * std::sqrt(0.25 / double(exits)));
}

TEST_CASE("tweets average lambda times the previous day's infected") {
  SimConfig cfg;
  double dev = 0.0, var = 0.0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    cfg.seed = seed;
    const SimOutput out = simulate(cfg);
    for (std::size_t d = 1; d < out.rows.size(); ++d) {
      const double I = double(out.rows[d - 1].I);
      dev += double(out.rows[d].tweets) - cfg.lambda * I;
      var += I * cfg.lambda * (1.0 - cfg.lambda);
      CHECK(out.rows[d].tweets <= out.rows[d - 1].I);
    }
  }
  CHECK(std::abs(dev) < 3.0 * std::sqrt(var));
}

TEST_CASE("mean residence in I converges to d_I") {
  // Without transmission every agent in I at day 0 leaves after a geometric
  // number of days with mean d_I; summing I over rows counts agent-days.
  SimConfig cfg;
  cfg.beta = 0.0;
  cfg.omega = 0.0;
  cfg.I0 = 100;
  cfg.t = 300;
  double agent_days = 0.0, agents = 0.0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    cfg.seed = seed;
    const SimOutput out = simulate(cfg);
    REQUIRE(out.rows.back().I == 0);
    for (const SimRow& r : out.rows) agent_days += double(r.I);
    agents += double(cfg.I0);
  }
  // Geometric(1/d_I) dwell has variance (1-p)/p^2.
  const double p = 1.0 / cfg.d_I;
  const double se = std::sqrt((1.0 - p) / (p * p) / agents);
  CHECK(std::abs(agent_days / agents - cfg.d_I) < 3.0 * se);
}

TEST_CASE("invalid simulation configurations") {
  auto bad = [](auto mutate) {
    SimConfig cfg;
    mutate(cfg);
    return cfg;
  };
  CHECK_THROWS_AS(simulate(bad([](SimConfig& c) { c.I0 = 0; })), InvalidConfig);
  CHECK_THROWS_AS(simulate(bad([](SimConfig& c) { c.I0 = c.N + 1; })), InvalidConfig);
  CHECK_THROWS_AS(simulate(bad([](SimConfig& c) { c.C = 0; })), InvalidConfig);
  CHECK_THROWS_AS(simulate(bad([](SimConfig& c) { c.d_I = 0.5; })), InvalidConfig);
  CHECK_THROWS_AS(simulate(bad([](SimConfig& c) { c.omega = 1.5; })), InvalidConfig);
  CHECK_THROWS_AS(simulate(bad([](SimConfig& c) { c.beta = 20.0; })), InvalidConfig);
}

TEST_CASE("output validation catches broken rows") {
  SimOutput out = simulate(SimConfig{});
  out.rows[5].S += 1;
  CHECK_THROWS_AS(out.validate(10000), InvariantViolation);
  out = simulate(SimConfig{});
  out.rows[10].tweets = out.rows[9].I + 1;
  CHECK_THROWS_AS(out.validate(), InvariantViolation);
}
