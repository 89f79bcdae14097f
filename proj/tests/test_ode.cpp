#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "sirtd/errors.hpp"
#include "sirtd/ode.hpp"

using namespace sirtd;

namespace {

const EpidemicParams kRef{0.3, 0.1, 0.2, 7.0, 10.0, 1.0, 1.0};

std::vector<double> day_grid(int n) {
  std::vector<double> d(static_cast<std::size_t>(n));
  std::iota(d.begin(), d.end(), 0.0);
  return d;
}

const VectorField kDecay = [](double, std::span<const double> y, std::span<double> dy) { dy[0] = -y[0]; };

double decay_error(double tol) {
  SolverConfig cfg;
  cfg.rtol = cfg.atol = tol;
  cfg.max_steps = 1000000;
  const std::vector<double> y0{1.0}, t{1.0};
  return std::abs(integrate(kDecay, y0, 0.0, t, cfg)[0][0] - std::exp(-1.0));
}

}  // namespace

TEST_CASE("SIRTD right-hand side at the reference point") {
  const auto d = sirtd_rhs({9990, 10, 0, 0, 0}, kRef, 10000);
  // Independent substitution: infection flow beta*S*I/N, exit flow I/d_I.
  const double inf = 0.3 * 9990.0 * 10.0 / 10000.0;
  const double exit = 10.0 / 7.0;
  CHECK(d[0] == doctest::Approx(-2.997).epsilon(1e-14));
  CHECK(d[0] == doctest::Approx(-inf).epsilon(1e-15));
  CHECK(d[1] == doctest::Approx(inf - exit).epsilon(1e-14));
  CHECK(d[1] == doctest::Approx(1.568428571428571).epsilon(1e-12));
  CHECK(d[2] == doctest::Approx(1.285714285714).epsilon(1e-12));
  CHECK(d[3] == doctest::Approx(0.142857142857).epsilon(1e-11));
  CHECK(d[4] == 0.0);
  CHECK(std::abs(d[0] + d[1] + d[2] + d[3] + d[4]) < 1e-14);
}

TEST_CASE("SIRTD right-hand side special cases") {
  for (double x : sirtd_rhs({100, 0, 5, 0, 3}, kRef, 108)) CHECK(x == 0.0);
  const auto d = sirtd_rhs({0, 0, 0, 10, 0}, kRef, 10);
  CHECK(d[3] == doctest::Approx(-1.0));
  CHECK(d[4] == doctest::Approx(1.0));
  CHECK(d[0] == 0.0);
  CHECK(d[1] == 0.0);
  CHECK(d[2] == 0.0);
}

TEST_CASE("exponential decay at t = 1") {
  CHECK(decay_error(1e-6) < 2e-6);
  const std::vector<double> y0{1.0}, t{0.0, 0.5, 1.0};
  const auto out = integrate(kDecay, y0, 0.0, t, SolverConfig{});
  REQUIRE(out.size() == 3);
  CHECK(out[0][0] == 1.0);
  CHECK(out[1][0] == doctest::Approx(std::exp(-0.5)).epsilon(1e-6));
}

TEST_CASE("tightening tolerances reduces the error") {
  double prev = decay_error(1e-4);
  for (double tol : {1e-6, 1e-8, 1e-10}) {
    const double e = decay_error(tol);
    CHECK(e < prev);
    prev = e;
  }
  CHECK(decay_error(1e-12) < 1e-11);
}

TEST_CASE("no infected individuals is an equilibrium") {
  const CompartmentState y0{9000, 0, 900, 0, 100};
  const Trajectory tr = solve_sirtd(kRef, y0, 10000, day_grid(30), SolverConfig{});
  REQUIRE(tr.size() == 30);
  for (const auto& s : tr.states) CHECK(s == y0);
}

TEST_CASE("conservation and monotonicity over random parameters") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const SolverConfig cfg;
  const double N = 10000;
  for (int trial = 0; trial < 50; ++trial) {
    const EpidemicParams p{0.05 + 2.0 * u(rng), u(rng), u(rng), 1.0 + 14.0 * u(rng), 1.0 + 14.0 * u(rng), 1, 1};
    const Trajectory tr = solve_sirtd(p, {9990, 10, 0, 0, 0}, N, day_grid(70), cfg);
    for (std::size_t i = 0; i < tr.size(); ++i) {
      CHECK(std::abs(tr.states[i].total() - N) < 10.0 * (cfg.atol + cfg.rtol * N));
      CHECK(std::abs(tr.states[i].total() - N) <= 1e-6 * N);
      if (i > 0) {
        CHECK(tr.states[i].D >= tr.states[i - 1].D);
        // Exact for the ODE; the interpolant may wobble at rounding level once S is flat.
        CHECK(tr.states[i].S <= tr.states[i - 1].S + 1e-12 * N);
      }
    }
  }
}

TEST_CASE("step budget and non-finite states are reported") {
  SolverConfig cfg;
  cfg.max_steps = 3;
  const std::vector<double> y0{1.0}, t{100.0};
  const VectorField osc = [](double, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[1];
    dy[1] = -100.0 * y[0];
  };
  const std::vector<double> y2{1.0, 0.0};
  CHECK_THROWS_AS(integrate(osc, y2, 0.0, t, cfg), MaxStepsExceeded);

  const VectorField blowup = [](double, std::span<const double>, std::span<double> dy) { dy[0] = NAN; };
  CHECK_THROWS_AS(integrate(blowup, y0, 0.0, t, SolverConfig{}), NonFiniteState);

  // Finite-time blowup of y' = y^2 from y(0) = 1 at t = 1.
  const VectorField sq = [](double, std::span<const double> y, std::span<double> dy) { dy[0] = y[0] * y[0]; };
  const std::vector<double> t2{2.0};
  CHECK_THROWS_AS(integrate(sq, y0, 0.0, t2, SolverConfig{}), NumericalError);
}

TEST_CASE("negative states beyond the tolerance are an error under the guard") {
  const VectorField sink = [](double, std::span<const double>, std::span<double> dy) { dy[0] = -1.0; };
  const std::vector<double> y0{1.0}, t{0.5, 3.0};
  const auto ok = integrate(sink, y0, 0.0, std::span<const double>(t).first(1), SolverConfig{}, {true});
  CHECK(ok[0][0] == doctest::Approx(0.5));
  CHECK_THROWS_AS(integrate(sink, y0, 0.0, t, SolverConfig{}, {true}), NonFiniteState);
  CHECK_NOTHROW(integrate(sink, y0, 0.0, t, SolverConfig{}));
}

TEST_CASE("invalid solver inputs") {
  SolverConfig cfg;
  cfg.rtol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
  const std::vector<double> y0{1.0}, t{1.0, 0.5};
  CHECK_THROWS_AS(integrate(kDecay, y0, 0.0, t, SolverConfig{}), DomainError);
  const std::vector<double> early{-1.0};
  CHECK_THROWS_AS(integrate(kDecay, y0, 0.0, early, SolverConfig{}), DomainError);
}
