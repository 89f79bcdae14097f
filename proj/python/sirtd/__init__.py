"""SIRTD agent-based simulation, Bayesian ODE fitting and MCMC diagnostics."""

from ._sirtd import (
    PARAM_NAMES,
    EpidemicParams,
    InfectionMode,
    ObservedData,
    OmegaPrior,
    PriorConfig,
    SamplerConfig,
    SimConfig,
    SirtdError,
    SolverConfig,
    __version__,
    ess_bulk,
    ess_tail,
    fit,
    from_unconstrained,
    log_likelihood,
    log_prior,
    nb2_log_pmf,
    posterior_predictive,
    simulate,
    simulate_observations,
    sirtd_rhs,
    solve_sirtd,
    split_rhat,
    summarize,
    to_unconstrained,
)

__all__ = [
    "PARAM_NAMES",
    "EpidemicParams",
    "InfectionMode",
    "ObservedData",
    "OmegaPrior",
    "PriorConfig",
    "SamplerConfig",
    "SimConfig",
    "SirtdError",
    "SolverConfig",
    "ess_bulk",
    "ess_tail",
    "fit",
    "from_unconstrained",
    "log_likelihood",
    "log_prior",
    "nb2_log_pmf",
    "posterior_predictive",
    "simulate",
    "simulate_observations",
    "sirtd_rhs",
    "solve_sirtd",
    "split_rhat",
    "summarize",
    "to_unconstrained",
]
