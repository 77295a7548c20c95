"""Unbiased Monte Carlo estimation from coupled pairs of Markov chains.

Run two chains of the same MCMC kernel jointly so that they meet exactly
after a random number of steps; a telescoping correction then removes the
burn-in bias, so independent replicates average to the true expectation
and admit ordinary CLT confidence intervals.
"""
from .couplings import (
    CouplingOutcome,
    DensityAndSampler,
    RunawayCouplingError,
    crn_pair,
    maximal_coupling,
    maximal_coupling_discrete,
    quantile_coupling,
)
from .diagnostics import (
    MeetingTimeSample,
    choose_k_m,
    fit_geometric_tail,
    sample_meeting_times,
    survival_curve,
    tv_upper_bound,
)
from .estimators import (
    CoupledRun,
    EstimateReport,
    MeetingTimeout,
    aggregate,
    h_k,
    h_km,
    run_coupled,
    unbiased_estimate,
)
from .measures import SignedMeasure, ecdf_and_quantile, histogram, signed_measure
from .rng import RngStream, StreamFactory, derive_stream, sample_primitive
from .targets import TargetModel, ar1_gaussian_target, bimodal_mixture_target, std_normal_target

__version__ = "0.1.0"

__all__ = [
    "CouplingOutcome",
    "DensityAndSampler",
    "RunawayCouplingError",
    "crn_pair",
    "maximal_coupling",
    "maximal_coupling_discrete",
    "quantile_coupling",
    "MeetingTimeSample",
    "choose_k_m",
    "fit_geometric_tail",
    "sample_meeting_times",
    "survival_curve",
    "tv_upper_bound",
    "CoupledRun",
    "EstimateReport",
    "MeetingTimeout",
    "aggregate",
    "h_k",
    "h_km",
    "run_coupled",
    "unbiased_estimate",
    "SignedMeasure",
    "ecdf_and_quantile",
    "histogram",
    "signed_measure",
    "RngStream",
    "StreamFactory",
    "derive_stream",
    "sample_primitive",
    "TargetModel",
    "ar1_gaussian_target",
    "bimodal_mixture_target",
    "std_normal_target",
    "__version__",
]
