#include <doctest.h>

#include <cfloat>
#include <cmath>
#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "sirtd/core.hpp"
#include "sirtd/errors.hpp"

using namespace sirtd;

namespace {

EpidemicParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto pos = [&] { return std::exp(6.0 * u(rng) - 3.0); };
  return {pos(), 0.001 + 0.998 * u(rng), 0.001 + 0.998 * u(rng), pos(), pos(), pos(), pos()};
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("unit parameters map to the zero vector") {
  const ParamVector v = to_unconstrained(EpidemicParams{1, 0.5, 0.5, 1, 1, 1, 1});
  for (double x : v) CHECK(x == 0.0);
}

TEST_CASE("beta = e maps to 1 in the first coordinate") {
  EpidemicParams p;
  p.beta = std::exp(1.0);
  CHECK(to_unconstrained(p)[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("reference parameters match an element-wise log/logit oracle") {
  const EpidemicParams p{0.3, 0.1, 0.2, 7.0, 10.0, 1.0, 1.0};
  const ParamVector v = to_unconstrained(p);
  const double expected[7] = {std::log(0.3), std::log(0.1 / 0.9), std::log(0.2 / 0.8), std::log(7.0),
                              std::log(10.0), 0.0, 0.0};
  for (std::size_t i = 0; i < 7; ++i) CHECK(v[i] == doctest::Approx(expected[i]).epsilon(1e-14));
}

TEST_CASE("zero vector maps back to unit parameters with log Jacobian 2 log(1/4)") {
  const Unconstrained u = from_unconstrained(ParamVector{});
  CHECK(u.params == EpidemicParams{1, 0.5, 0.5, 1, 1, 1, 1});
  CHECK(u.log_jacobian == doctest::Approx(2.0 * std::log(0.25)).epsilon(1e-15));
}

TEST_CASE("large unconstrained components stay finite") {
  using Big = boost::multiprecision::cpp_bin_float_50;
  ParamVector v{};
  v[0] = 700.0;  // exp(700) is finite in double
  v[1] = 700.0;  // logit component saturates at 1
  const Unconstrained u = from_unconstrained(v);
  CHECK(std::isfinite(u.params.beta));
  CHECK(rel_err(u.params.beta, static_cast<double>(exp(Big(700)))) < 1e-12);
  CHECK(u.params.omega == 1.0);
  // log sigma(700) + log sigma(-700) = -700 - 2 log1p(e^-700), in extended precision.
  const Big tail = log(1 + exp(Big(-700)));
  const double expected_logit_term = static_cast<double>(-Big(700) - 2 * tail);
  CHECK(std::isfinite(u.log_jacobian));
  // Components: log beta = 700, logit omega at 700, logit lambda at 0.
  CHECK(u.log_jacobian == doctest::Approx(700.0 + expected_logit_term + std::log(0.25)).epsilon(1e-12));

  v[3] = 1e6;  // would overflow exp
  const Unconstrained w = from_unconstrained(v);
  CHECK(std::isfinite(w.params.d_I));
  CHECK(w.params.d_I > 0.99 * DBL_MAX);
  CHECK(std::isfinite(w.log_jacobian));
}

TEST_CASE("round trip through the unconstrained space is the identity") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    const EpidemicParams p = random_params(rng);
    const EpidemicParams q = from_unconstrained(to_unconstrained(p)).params;
    const ParamVector a = p.to_array();
    const ParamVector b = q.to_array();
    for (std::size_t i = 0; i < kNumParams; ++i) CHECK(rel_err(b[i], a[i]) < 1e-12);
  }
}

TEST_CASE("log Jacobian matches a central finite difference of the map") {
  // The map is diagonal, so log|det| is the sum of log|d param_i / d v_i|.
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z(0.0, 1.5);
  const double h = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    ParamVector v;
    for (double& x : v) x = z(rng);
    double fd = 0.0;
    for (std::size_t i = 0; i < kNumParams; ++i) {
      ParamVector hi = v, lo = v;
      hi[i] += h;
      lo[i] -= h;
      const double d = (from_unconstrained(hi).params.to_array()[i] - from_unconstrained(lo).params.to_array()[i]) /
                       (2.0 * h);
      fd += std::log(std::abs(d));
    }
    CHECK(from_unconstrained(v).log_jacobian == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(EpidemicParams{}.validate());
  CHECK_THROWS_AS((EpidemicParams{0.0, 0.5, 0.5, 1, 1, 1, 1}.validate()), InvalidParams);
  CHECK_THROWS_AS((EpidemicParams{1.0, 1.5, 0.5, 1, 1, 1, 1}.validate()), InvalidParams);
  CHECK_THROWS_AS((EpidemicParams{1.0, 0.5, -0.1, 1, 1, 1, 1}.validate()), InvalidParams);
  CHECK_THROWS_AS((EpidemicParams{1.0, 0.5, 0.5, 1, 1, 1, NAN}.validate()), InvalidParams);
  CHECK((EpidemicParams{1.0, 0.0, 1.0, 1, 1, 1, 1}.is_valid()));

  PriorConfig priors;
  CHECK_NOTHROW(priors.validate());
  priors.sigma_beta = 0.0;
  CHECK_THROWS_AS(priors.validate(), InvalidConfig);
}

TEST_CASE("observed data validation") {
  ObservedData obs;
  obs.days = {0, 1, 2};
  obs.cumulative_deaths = {0, 1, 1};
  obs.tweet_counts = {3, 4, 5};
  obs.N = 100;
  obs.y0 = {90, 10, 0, 0, 0};
  CHECK_NOTHROW(obs.validate());

  ObservedData bad = obs;
  bad.cumulative_deaths = {0, 2, 1};
  CHECK_THROWS_AS(bad.validate(), NonMonotoneDeaths);
  bad.require_monotone_deaths = false;
  CHECK_NOTHROW(bad.validate());

  bad = obs;
  bad.tweet_counts.pop_back();
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  bad = obs;
  bad.y0.S = 80;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("stable logistic helpers") {
  CHECK(logistic(0.0) == 0.5);
  CHECK(logit(0.5) == 0.0);
  CHECK(log_logistic(-800.0) == doctest::Approx(-800.0));
  CHECK(log_logistic(800.0) == 0.0);
  CHECK(logit(logistic(3.0)) == doctest::Approx(3.0).epsilon(1e-14));
}
