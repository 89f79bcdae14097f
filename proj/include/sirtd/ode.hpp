#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "sirtd/core.hpp"

namespace sirtd {

struct SolverConfig {
  double rtol = 1e-6;
  double atol = 1e-6;
  long max_steps = 10000;  // accepted + rejected steps over the whole call

  void validate() const;
};

// dy/dt = f(t, y). Writes into dydt, which has the same length as y.
using VectorField = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

struct IntegrateOptions {
  // Output components in (-atol, 0) are clamped to 0; anything further below
  // zero raises NonFiniteState.
  bool nonnegative = false;
};

/// Adaptive Dormand-Prince 5(4) integration from (t0, y0), reporting the
/// solution at each of `output_times` through the method's continuous
/// extension. Output times must be strictly increasing and >= t0; an output
/// time equal to t0 reports y0.
///
/// Throws MaxStepsExceeded when more than cfg.max_steps steps are attempted
/// and NonFiniteState on NaN/Inf (or a negative state under `nonnegative`).
std::vector<std::vector<double>> integrate(const VectorField& rhs, std::span<const double> y0, double t0,
                                           std::span<const double> output_times, const SolverConfig& cfg,
                                           IntegrateOptions options = {});

// (dS, dI, dR, dT, dD) of the SIRTD system.
std::array<double, 5> sirtd_rhs(const CompartmentState& y, const EpidemicParams& p, double N) noexcept;

// Integrates the SIRTD system from y0 at t0 = days.front() (or 0 when days is
// empty) with the non-negativity guard enabled.
Trajectory solve_sirtd(const EpidemicParams& p, const CompartmentState& y0, double N, std::span<const double> days,
                       const SolverConfig& cfg);

}  // namespace sirtd
