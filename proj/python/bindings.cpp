#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sirtd/abm.hpp"
#include "sirtd/core.hpp"
#include "sirtd/diagnostics.hpp"
#include "sirtd/errors.hpp"
#include "sirtd/mcmc.hpp"
#include "sirtd/model.hpp"
#include "sirtd/ode.hpp"

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace py = pybind11;
using namespace sirtd;

namespace {

py::array_t<std::int64_t> sim_to_array(const SimOutput& out) {
  py::array_t<std::int64_t> arr({static_cast<py::ssize_t>(out.rows.size()), py::ssize_t{7}});
  auto a = arr.mutable_unchecked<2>();
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    const SimRow& r = out.rows[i];
    const std::int64_t row[7] = {r.day, r.S, r.I, r.R, r.T, r.D, r.tweets};
    for (py::ssize_t j = 0; j < 7; ++j) a(static_cast<py::ssize_t>(i), j) = row[j];
  }
  return arr;
}

py::array_t<double> trajectory_to_array(const Trajectory& traj) {
  py::array_t<double> arr({static_cast<py::ssize_t>(traj.size()), py::ssize_t{5}});
  auto a = arr.mutable_unchecked<2>();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto s = traj.states[i].to_array();
    for (py::ssize_t j = 0; j < 5; ++j) a(static_cast<py::ssize_t>(i), j) = s[static_cast<std::size_t>(j)];
  }
  return arr;
}

// (chains, draws, 7) constrained draws.
py::array_t<double> draws_to_array(const ChainDraws& d) {
  const auto nc = static_cast<py::ssize_t>(d.n_chains());
  const auto nd = static_cast<py::ssize_t>(d.n_draws());
  py::array_t<double> arr({nc, nd, static_cast<py::ssize_t>(kNumParams)});
  auto a = arr.mutable_unchecked<3>();
  for (py::ssize_t c = 0; c < nc; ++c) {
    for (py::ssize_t i = 0; i < nd; ++i) {
      for (py::ssize_t j = 0; j < static_cast<py::ssize_t>(kNumParams); ++j) {
        a(c, i, j) = d.chains[static_cast<std::size_t>(c)].draws[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      }
    }
  }
  return arr;
}

ChainDraws array_to_draws(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
  if (arr.ndim() != 3 || arr.shape(2) != static_cast<py::ssize_t>(kNumParams)) {
    throw std::invalid_argument("draws must have shape (chains, draws, 7)");
  }
  auto a = arr.unchecked<3>();
  ChainDraws d;
  d.chains.resize(static_cast<std::size_t>(arr.shape(0)));
  for (py::ssize_t c = 0; c < arr.shape(0); ++c) {
    for (py::ssize_t i = 0; i < arr.shape(1); ++i) {
      ParamVector row{};
      for (std::size_t j = 0; j < kNumParams; ++j) row[j] = a(c, i, static_cast<py::ssize_t>(j));
      d.chains[static_cast<std::size_t>(c)].draws.push_back(row);
      d.chains[static_cast<std::size_t>(c)].unconstrained.push_back(to_unconstrained(EpidemicParams::from_array(row)));
    }
  }
  return d;
}

ChainSeries array_to_series(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
  if (arr.ndim() != 2) throw std::invalid_argument("chains must have shape (chains, draws)");
  auto a = arr.unchecked<2>();
  ChainSeries s(static_cast<std::size_t>(arr.shape(0)));
  for (py::ssize_t c = 0; c < arr.shape(0); ++c) {
    for (py::ssize_t i = 0; i < arr.shape(1); ++i) s[static_cast<std::size_t>(c)].push_back(a(c, i));
  }
  return s;
}

py::dict summary_row(const SummaryRow& r) {
  py::dict d;
  d["variable"] = r.name;
  d["mean"] = r.mean;
  d["median"] = r.median;
  d["sd"] = r.sd;
  d["mad"] = r.mad;
  d["q5"] = r.q5;
  d["q95"] = r.q95;
  d["rhat"] = r.rhat;
  d["ess_bulk"] = r.ess_bulk;
  d["ess_tail"] = r.ess_tail;
  return d;
}

}  // namespace

PYBIND11_MODULE(_sirtd, m) {
  m.doc() = "SIRTD agent-based simulation, Bayesian ODE fitting and MCMC diagnostics";

  py::register_exception<Error>(m, "SirtdError", PyExc_RuntimeError);

  m.attr("PARAM_NAMES") = py::cast(std::vector<std::string>(kParamNames.begin(), kParamNames.end()));

  py::class_<EpidemicParams>(m, "EpidemicParams")
      .def(py::init([](double beta, double omega, double lambda_, double d_I, double d_T, double phi_deaths,
                       double phi_tweets) {
             EpidemicParams p{beta, omega, lambda_, d_I, d_T, phi_deaths, phi_tweets};
             p.validate();
             return p;
           }),
           py::arg("beta"), py::arg("omega"), py::arg("lambda_"), py::arg("d_I"), py::arg("d_T"),
           py::arg("phi_deaths") = 1.0, py::arg("phi_tweets") = 1.0)
      .def_readonly("beta", &EpidemicParams::beta)
      .def_readonly("omega", &EpidemicParams::omega)
      .def_readonly("lambda_", &EpidemicParams::lambda)
      .def_readonly("d_I", &EpidemicParams::d_I)
      .def_readonly("d_T", &EpidemicParams::d_T)
      .def_readonly("phi_deaths", &EpidemicParams::phi_deaths)
      .def_readonly("phi_tweets", &EpidemicParams::phi_tweets)
      .def("to_list", [](const EpidemicParams& p) {
        const auto a = p.to_array();
        return std::vector<double>(a.begin(), a.end());
      });

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("rtol", &SolverConfig::rtol)
      .def_readwrite("atol", &SolverConfig::atol)
      .def_readwrite("max_steps", &SolverConfig::max_steps);

  py::enum_<InfectionMode>(m, "InfectionMode")
      .value("per_contact_scaled", InfectionMode::per_contact_scaled)
      .value("per_contact_literal", InfectionMode::per_contact_literal);

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("N", &SimConfig::N)
      .def_readwrite("t", &SimConfig::t)
      .def_readwrite("C", &SimConfig::C)
      .def_readwrite("beta", &SimConfig::beta)
      .def_readwrite("omega", &SimConfig::omega)
      .def_readwrite("lambda_", &SimConfig::lambda)
      .def_readwrite("d_I", &SimConfig::d_I)
      .def_readwrite("d_T", &SimConfig::d_T)
      .def_readwrite("I0", &SimConfig::I0)
      .def_readwrite("seed", &SimConfig::seed)
      .def_readwrite("infection_mode", &SimConfig::infection_mode);

  py::enum_<OmegaPrior>(m, "OmegaPrior")
      .value("truncated_normal", OmegaPrior::truncated_normal)
      .value("beta", OmegaPrior::beta);

  py::class_<PriorConfig>(m, "PriorConfig")
      .def(py::init<>())
      .def_readwrite("mu_beta", &PriorConfig::mu_beta)
      .def_readwrite("sigma_beta", &PriorConfig::sigma_beta)
      .def_readwrite("omega_family", &PriorConfig::omega_family)
      .def_readwrite("mu_omega", &PriorConfig::mu_omega)
      .def_readwrite("sigma_omega", &PriorConfig::sigma_omega)
      .def_readwrite("alpha_omega", &PriorConfig::alpha_omega)
      .def_readwrite("beta_omega", &PriorConfig::beta_omega)
      .def_readwrite("alpha_lambda", &PriorConfig::alpha_lambda)
      .def_readwrite("beta_lambda", &PriorConfig::beta_lambda)
      .def_readwrite("mu_dI", &PriorConfig::mu_dI)
      .def_readwrite("sigma_dI", &PriorConfig::sigma_dI)
      .def_readwrite("mu_dT", &PriorConfig::mu_dT)
      .def_readwrite("sigma_dT", &PriorConfig::sigma_dT)
      .def_readwrite("rate_phi", &PriorConfig::rate_phi)
      .def_readwrite("rate_phi_tweets", &PriorConfig::rate_phi_tweets);

  py::class_<SamplerConfig>(m, "SamplerConfig")
      .def(py::init<>())
      .def_readwrite("n_chains", &SamplerConfig::n_chains)
      .def_readwrite("n_iterations", &SamplerConfig::n_iterations)
      .def_readwrite("n_warmup", &SamplerConfig::n_warmup)
      .def_readwrite("target_accept", &SamplerConfig::target_accept)
      .def_readwrite("steps_per_iteration", &SamplerConfig::steps_per_iteration)
      .def_readwrite("full_covariance", &SamplerConfig::full_covariance)
      .def_readwrite("initial_scale", &SamplerConfig::initial_scale)
      .def_readwrite("parallel", &SamplerConfig::parallel)
      .def_readwrite("seed", &SamplerConfig::seed);

  py::class_<ObservedData>(m, "ObservedData")
      .def(py::init([](std::vector<std::int64_t> deaths, std::vector<std::int64_t> tweets, double N,
                       std::array<double, 5> y0, bool require_monotone_deaths) {
             ObservedData obs;
             obs.cumulative_deaths = std::move(deaths);
             obs.tweet_counts = std::move(tweets);
             for (std::size_t i = 0; i < obs.cumulative_deaths.size(); ++i) obs.days.push_back(static_cast<int>(i));
             obs.N = N;
             obs.y0 = CompartmentState::from_array(y0);
             obs.require_monotone_deaths = require_monotone_deaths;
             obs.validate();
             return obs;
           }),
           py::arg("cumulative_deaths"), py::arg("tweet_counts"), py::arg("N"), py::arg("y0"),
           py::arg("require_monotone_deaths") = true)
      .def_readonly("days", &ObservedData::days)
      .def_readonly("cumulative_deaths", &ObservedData::cumulative_deaths)
      .def_readonly("tweet_counts", &ObservedData::tweet_counts)
      .def_readonly("N", &ObservedData::N)
      .def_property_readonly("y0", [](const ObservedData& o) { return o.y0.to_array(); });

  m.def("simulate", [](const SimConfig& cfg) { return sim_to_array(simulate(cfg)); }, py::arg("config"),
        "Agent-based simulation; returns an int64 array with columns day,S,I,R,T,D,tweets.");

  m.def("sirtd_rhs",
        [](std::array<double, 5> y, const EpidemicParams& p, double N) {
          return sirtd_rhs(CompartmentState::from_array(y), p, N);
        },
        py::arg("y"), py::arg("params"), py::arg("N"));

  m.def("solve_sirtd",
        [](const EpidemicParams& p, std::array<double, 5> y0, double N, std::vector<double> days,
           const SolverConfig& cfg) {
          return trajectory_to_array(solve_sirtd(p, CompartmentState::from_array(y0), N, days, cfg));
        },
        py::arg("params"), py::arg("y0"), py::arg("N"), py::arg("days"), py::arg("solver") = SolverConfig{},
        "Integrates the SIRTD system; returns an (n_days, 5) array of S,I,R,T,D.");

  m.def("to_unconstrained", [](const EpidemicParams& p) { return to_unconstrained(p); });
  m.def("from_unconstrained", [](const ParamVector& v) {
    const Unconstrained u = from_unconstrained(v);
    return py::make_tuple(u.params, u.log_jacobian);
  });

  m.def("nb2_log_pmf", &nb2_log_pmf, py::arg("y"), py::arg("mu"), py::arg("disp"));
  m.def("log_prior", &log_prior, py::arg("params"), py::arg("priors") = PriorConfig{});
  m.def("log_likelihood",
        [](const EpidemicParams& p, const ObservedData& obs, const PriorConfig& priors, const SolverConfig& solver) {
          return log_likelihood(p, FitContext{obs, priors, solver});
        },
        py::arg("params"), py::arg("observed"), py::arg("priors") = PriorConfig{},
        py::arg("solver") = SolverConfig{});

  m.def("simulate_observations",
        [](const EpidemicParams& p, std::array<double, 5> y0, double N, int n_days, const SolverConfig& cfg,
           std::uint64_t seed) { return simulate_observations(p, CompartmentState::from_array(y0), N, n_days, cfg, seed); },
        py::arg("params"), py::arg("y0"), py::arg("N"), py::arg("n_days"), py::arg("solver") = SolverConfig{},
        py::arg("seed") = 1, "Draws NB2 observations around the ODE trajectory.");

  m.def("fit",
        [](const ObservedData& obs, const PriorConfig& priors, const SolverConfig& solver,
           const SamplerConfig& sampler) {
          ChainDraws draws;
          {
            py::gil_scoped_release release;
            draws = fit_posterior(FitContext{obs, priors, solver}, sampler);
          }
          py::list acceptance;
          for (const Chain& c : draws.chains) acceptance.append(c.acceptance_rate);
          return py::make_tuple(draws_to_array(draws), acceptance);
        },
        py::arg("observed"), py::arg("priors") = PriorConfig{}, py::arg("solver") = SolverConfig{},
        py::arg("sampler") = SamplerConfig{},
        "Runs the sampler; returns (draws[chains, draws, 7], per-chain acceptance rates).");

  m.def("posterior_predictive",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& draws, const ObservedData& obs,
           const SolverConfig& solver, std::uint64_t seed) {
          const PredictiveTable t = posterior_predictive(array_to_draws(draws), FitContext{obs, {}, solver}, seed);
          py::dict out;
          for (std::size_t c = 0; c < kChannels.size(); ++c) {
            py::dict band;
            band["mean"] = t.bands[c].mean;
            band["q5"] = t.bands[c].q5;
            band["q95"] = t.bands[c].q95;
            out[py::str(std::string(kChannels[c]))] = band;
          }
          out["n_skipped"] = t.n_skipped;
          return out;
        },
        py::arg("draws"), py::arg("observed"), py::arg("solver") = SolverConfig{}, py::arg("seed") = 1);

  m.def("summarize",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& draws) {
          py::list rows;
          for (const SummaryRow& r : summarize(array_to_draws(draws))) rows.append(summary_row(r));
          return rows;
        },
        py::arg("draws"), "Table-shaped posterior summary of (chains, draws, 7) constrained draws.");

  m.def("split_rhat", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    return split_rhat(array_to_series(a));
  });
  m.def("ess_bulk", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    return ess_bulk(array_to_series(a));
  });
  m.def("ess_tail", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    return ess_tail(array_to_series(a));
  });

#ifdef VERSION_INFO
  m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
