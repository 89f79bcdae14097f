#include "sirtd/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sirtd/errors.hpp"

namespace sirtd {

namespace {

// Dormand & Prince (1980), "A family of embedded Runge-Kutta formulae",
// J. Comp. Appl. Math. 6(1), RK5(4)7M. Dense output coefficients are the
// continuous extension from Hairer, Norsett & Wanner, Solving ODEs I, II.6.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;

constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
// Fifth-order weights; also row 7 of the tableau (first same as last).
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                 b6 = 11.0 / 84.0;
// b - b_hat, where b_hat are the embedded fourth-order weights.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

// PI step-size controller.
constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 10.0;
constexpr double kBetaPI = 0.04;
constexpr double kExpo = 0.2 - 0.75 * kBetaPI;

using Vec = std::vector<double>;

bool all_finite(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double weighted_rms(const Vec& num, const Vec& ya, const Vec& yb, const SolverConfig& cfg) {
  double sum = 0.0;
  for (std::size_t i = 0; i < num.size(); ++i) {
    const double sk = cfg.atol + cfg.rtol * std::max(std::abs(ya[i]), std::abs(yb[i]));
    const double r = num[i] / sk;
    sum += r * r;
  }
  return std::sqrt(sum / static_cast<double>(num.size()));
}

double initial_step(const VectorField& rhs, double t0, const Vec& y0, const Vec& f0, double hmax,
                    const SolverConfig& cfg) {
  const std::size_t n = y0.size();
  double dnf = 0.0, dny = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sk = cfg.atol + cfg.rtol * std::abs(y0[i]);
    dnf += (f0[i] / sk) * (f0[i] / sk);
    dny += (y0[i] / sk) * (y0[i] / sk);
  }
  dnf /= static_cast<double>(n);
  dny /= static_cast<double>(n);
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
  h = std::min(h, hmax);

  Vec y1(n), f1(n);
  for (std::size_t i = 0; i < n; ++i) y1[i] = y0[i] + h * f0[i];
  rhs(t0 + h, y1, f1);
  double der2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sk = cfg.atol + cfg.rtol * std::abs(y0[i]);
    der2 += ((f1[i] - f0[i]) / sk) * ((f1[i] - f0[i]) / sk);
  }
  der2 = std::sqrt(der2 / static_cast<double>(n)) / h;
  const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
  const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
  const double out = std::min({100.0 * h, h1, hmax});
  return std::isfinite(out) && out > 0.0 ? out : std::min(1e-6, hmax);
}

void guard_output(Vec& y, double t, const SolverConfig& cfg, const IntegrateOptions& options) {
  for (double& c : y) {
    if (!std::isfinite(c)) throw NonFiniteState("non-finite state at t = " + std::to_string(t));
    if (options.nonnegative && c < 0.0) {
      if (c > -cfg.atol) {
        c = 0.0;
      } else {
        throw NonFiniteState("state component " + std::to_string(c) + " below zero at t = " + std::to_string(t));
      }
    }
  }
}

}  // namespace

void SolverConfig::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0)) throw InvalidConfig("solver tolerances must be > 0");
  if (max_steps < 1) throw InvalidConfig("solver max_steps must be >= 1");
}

std::vector<std::vector<double>> integrate(const VectorField& rhs, std::span<const double> y0_in, double t0,
                                           std::span<const double> output_times, const SolverConfig& cfg,
                                           IntegrateOptions options) {
  cfg.validate();
  const std::size_t n = y0_in.size();
  const std::size_t n_out = output_times.size();
  for (std::size_t i = 0; i < n_out; ++i) {
    if (!(output_times[i] >= t0) || (i > 0 && !(output_times[i] > output_times[i - 1]))) {
      throw DomainError("output times must be strictly increasing and >= t0");
    }
  }

  std::vector<Vec> out;
  out.reserve(n_out);
  Vec y(y0_in.begin(), y0_in.end());
  if (!all_finite(y)) throw NonFiniteState("non-finite initial state");

  std::size_t next = 0;
  while (next < n_out && output_times[next] == t0) {
    Vec copy = y;
    guard_output(copy, t0, cfg, options);
    out.push_back(std::move(copy));
    ++next;
  }
  if (next == n_out || n == 0) {
    while (out.size() < n_out) out.push_back(y);
    return out;
  }

  Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y_new(n), err(n);
  Vec r2(n), r3(n), r4(n), r5(n);
  const double t_end = output_times[n_out - 1];
  double t = t0;

  rhs(t, y, k1);
  if (!all_finite(k1)) throw NonFiniteState("non-finite derivative at t0");
  double h = initial_step(rhs, t, y, k1, t_end - t0, cfg);

  long steps = 0;
  double err_old = 1e-4;
  bool last_rejected = false;

  while (next < n_out) {
    if (++steps > cfg.max_steps) {
      throw MaxStepsExceeded("exceeded " + std::to_string(cfg.max_steps) + " steps at t = " + std::to_string(t));
    }
    if (t + h >= t_end || t + 1.01 * h >= t_end) h = t_end - t;
    if (!(h > std::abs(t) * 1e-14)) throw NonFiniteState("step size underflow at t = " + std::to_string(t));

    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    rhs(t + c2 * h, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * h, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(t + c4 * h, tmp, k4);
    for (std::size_t i = 0; i < n; ++i) {
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    }
    rhs(t + c5 * h, tmp, k5);
    for (std::size_t i = 0; i < n; ++i) {
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    }
    rhs(t + h, tmp, k6);
    for (std::size_t i = 0; i < n; ++i) {
      y_new[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    }
    rhs(t + h, y_new, k7);
    for (std::size_t i = 0; i < n; ++i) {
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    }

    const double err_norm = weighted_rms(err, y, y_new, cfg);
    if (!std::isfinite(err_norm) || !all_finite(y_new) || !all_finite(k7)) {
      h *= kMinFactor;
      last_rejected = true;
      continue;
    }

    if (err_norm > 1.0) {
      h *= std::max(kMinFactor, kSafety * std::pow(err_norm, -kExpo));
      last_rejected = true;
      continue;
    }

    // Accepted: emit every output time inside (t, t + h].
    const double t_new = (h == t_end - t) ? t_end : t + h;
    if (next < n_out && output_times[next] <= t_new) {
      for (std::size_t i = 0; i < n; ++i) {
        const double ydiff = y_new[i] - y[i];
        const double bspl = h * k1[i] - ydiff;
        r2[i] = ydiff;
        r3[i] = bspl;
        r4[i] = ydiff - h * k7[i] - bspl;
        r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
      }
      while (next < n_out && output_times[next] <= t_new) {
        Vec yo(n);
        if (output_times[next] == t_new) {
          yo = y_new;
        } else {
          const double theta = (output_times[next] - t) / h;
          const double theta1 = 1.0 - theta;
          for (std::size_t i = 0; i < n; ++i) {
            yo[i] = y[i] + theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])));
          }
        }
        guard_output(yo, output_times[next], cfg, options);
        out.push_back(std::move(yo));
        ++next;
      }
    }

    double factor = kSafety * std::pow(err_norm, -kExpo) * std::pow(err_old, kBetaPI);
    factor = std::clamp(factor, kMinFactor, kMaxFactor);
    if (last_rejected) factor = std::min(factor, 1.0);
    err_old = std::max(err_norm, 1e-4);
    last_rejected = false;

    t = t_new;
    y.swap(y_new);
    k1.swap(k7);
    h *= factor;
  }
  return out;
}

std::array<double, 5> sirtd_rhs(const CompartmentState& y, const EpidemicParams& p, double N) noexcept {
  const double infection = p.beta * y.S * y.I / N;
  const double exit_I = y.I / p.d_I;
  const double exit_T = y.T / p.d_T;
  return {-infection, infection - exit_I, exit_I * (1.0 - p.omega), exit_I * p.omega - exit_T, exit_T};
}

Trajectory solve_sirtd(const EpidemicParams& p, const CompartmentState& y0, double N, std::span<const double> days,
                       const SolverConfig& cfg) {
  const VectorField field = [&p, N](double, std::span<const double> y, std::span<double> dydt) {
    const auto d = sirtd_rhs(CompartmentState{y[0], y[1], y[2], y[3], y[4]}, p, N);
    std::copy(d.begin(), d.end(), dydt.begin());
  };
  const auto a = y0.to_array();
  const double t0 = days.empty() ? 0.0 : days.front();
  const auto values = integrate(field, a, t0, days, cfg, IntegrateOptions{.nonnegative = true});

  Trajectory traj;
  traj.days.assign(days.begin(), days.end());
  traj.states.reserve(values.size());
  for (const auto& v : values) traj.states.push_back({v[0], v[1], v[2], v[3], v[4]});
  return traj;
}

}  // namespace sirtd
