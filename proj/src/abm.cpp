#include "sirtd/abm.hpp"

#include <cmath>
#include <random>
#include <string>

#include "sirtd/errors.hpp"

namespace sirtd {

namespace {

enum class Health : std::uint8_t { S, I, R, T, D };

}  // namespace

void SimConfig::validate() const {
  auto fail = [](const std::string& msg) { throw InvalidConfig("simulation: " + msg); };
  if (N < 1) fail("N must be >= 1");
  if (t < 1) fail("t must be >= 1");
  if (I0 < 1 || I0 > N) fail("I0 must satisfy 0 < I0 <= N");
  if (C < 1) fail("C must be >= 1");
  if (!(beta >= 0.0) || !std::isfinite(beta)) fail("beta must be >= 0");
  if (!(omega >= 0.0 && omega <= 1.0)) fail("omega must be in [0, 1]");
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail("lambda must be in [0, 1]");
  if (!(d_I >= 1.0) || !std::isfinite(d_I)) fail("d_I must be >= 1");
  if (!(d_T >= 1.0) || !std::isfinite(d_T)) fail("d_T must be >= 1");
  const double p_contact = infection_mode == InfectionMode::per_contact_scaled ? beta / C : beta;
  if (p_contact > 1.0) fail("per-contact infection probability exceeds 1");
}

void SimOutput::validate(std::int64_t N) const {
  if (rows.empty()) return;
  const std::int64_t total = N > 0 ? N : rows.front().total();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SimRow& r = rows[i];
    const std::string where = " on day " + std::to_string(r.day);
    if (r.S < 0 || r.I < 0 || r.R < 0 || r.T < 0 || r.D < 0 || r.tweets < 0) {
      throw InvariantViolation("negative count" + where);
    }
    if (r.total() != total) {
      throw InvariantViolation("S+I+R+T+D = " + std::to_string(r.total()) + " != " + std::to_string(total) + where);
    }
    if (i > 0) {
      if (r.D < rows[i - 1].D) throw InvariantViolation("D decreases" + where);
      if (r.tweets > rows[i - 1].I) throw InvariantViolation("tweets exceed previous I" + where);
    }
  }
}

SimOutput simulate(const SimConfig& cfg) {
  cfg.validate();

  std::mt19937_64 rng(cfg.seed);
  std::bernoulli_distribution tweet(cfg.lambda);
  std::bernoulli_distribution leave_I(1.0 / cfg.d_I);
  std::bernoulli_distribution terminal(cfg.omega);
  std::bernoulli_distribution leave_T(1.0 / cfg.d_T);
  std::bernoulli_distribution infect(cfg.infection_mode == InfectionMode::per_contact_scaled ? cfg.beta / cfg.C
                                                                                              : cfg.beta);
  std::uniform_int_distribution<std::int64_t> pick(0, cfg.N - 1);

  // Initially infected agents are the first I0; contacts are uniform so the
  // placement carries no meaning.
  std::vector<Health> state(static_cast<std::size_t>(cfg.N), Health::S);
  for (std::int64_t a = 0; a < cfg.I0; ++a) state[static_cast<std::size_t>(a)] = Health::I;
  std::vector<Health> next = state;

  SimOutput out;
  out.rows.reserve(static_cast<std::size_t>(cfg.t));
  SimRow row{0, cfg.N - cfg.I0, cfg.I0, 0, 0, 0, 0};
  out.rows.push_back(row);

  for (int day = 1; day < cfg.t; ++day) {
    std::int64_t tweets = 0;
    for (std::size_t a = 0; a < state.size(); ++a) {
      switch (state[a]) {
        case Health::I: {
          if (tweet(rng)) ++tweets;
          if (leave_I(rng)) {
            if (terminal(rng)) {
              next[a] = Health::T;
              --row.I;
              ++row.T;
            } else {
              next[a] = Health::R;
              --row.I;
              ++row.R;
            }
          }
          for (int c = 0; c < cfg.C; ++c) {
            const auto target = static_cast<std::size_t>(pick(rng));
            // Only day-start susceptibles can be infected, and only once.
            if (state[target] == Health::S && next[target] == Health::S && infect(rng)) {
              next[target] = Health::I;
              --row.S;
              ++row.I;
            }
          }
          break;
        }
        case Health::T:
          if (leave_T(rng)) {
            next[a] = Health::D;
            --row.T;
            ++row.D;
          }
          break;
        default:
          break;
      }
    }
    state = next;
    row.day = day;
    row.tweets = tweets;
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace sirtd
