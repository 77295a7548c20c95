from .base import CoupledKernel, ThinnedKernel, log_accept_ratio, mh_accept, states_equal
from .hmc import HmcRwmhMixture, leapfrog
from .pump import PumpGibbs, gamma_density_and_sampler
from .rwmh import (
    GaussianProposal,
    MetropolisWithinGibbs,
    RandomWalkMetropolis,
    rwmh_coupled,
    rwmh_single,
)
from .varsel import VariableSelection, VarSelModel

__all__ = [
    "CoupledKernel",
    "ThinnedKernel",
    "log_accept_ratio",
    "mh_accept",
    "states_equal",
    "HmcRwmhMixture",
    "leapfrog",
    "PumpGibbs",
    "gamma_density_and_sampler",
    "GaussianProposal",
    "MetropolisWithinGibbs",
    "RandomWalkMetropolis",
    "rwmh_coupled",
    "rwmh_single",
    "VariableSelection",
    "VarSelModel",
]
