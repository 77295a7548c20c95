"""Gibbs sampler for the pump failure-count model, single and coupled.

The model: counts s_n ~ Poisson(lambda_n t_n), rates lambda_n ~
Gamma(alpha, beta), beta ~ Gamma(gamma, delta).  Both full conditionals
are gamma distributions, so the coupled kernel maximally couples each
conditional update; every comparison runs on normalized gamma densities.
State layout: (lambda_1, ..., lambda_K, beta).
"""
from __future__ import annotations

import math

import numpy as np

from ..couplings import DensityAndSampler, maximal_coupling
from ..rng import RngStream
from .base import CoupledKernel, states_equal

__all__ = ["PumpGibbs", "gamma_density_and_sampler"]


def gamma_density_and_sampler(shape: float, rate: float) -> DensityAndSampler:
    """Normalized Gamma(shape, rate) in log space with its exact sampler."""
    log_norm = shape * math.log(rate) - math.lgamma(shape)
    shape_m1 = shape - 1.0

    def log_density(x: float) -> float:
        if x <= 0.0:
            return -math.inf
        return log_norm + shape_m1 * math.log(x) - rate * x

    def sampler(s: RngStream) -> float:
        return float(s.gamma(shape, rate))

    return DensityAndSampler(log_density=log_density, sampler=sampler)


class PumpGibbs(CoupledKernel):
    """Systematic-scan Gibbs sweep: the K rates, then the gamma hyper-rate."""

    def __init__(self, t: np.ndarray, s_counts: np.ndarray, alpha: float = 1.802,
                 gamma: float = 0.01, delta: float = 1.0):
        self.t = np.asarray(t, dtype=float)
        self.s_counts = np.asarray(s_counts, dtype=float)
        if len(self.t) != len(self.s_counts):
            raise ValueError("t and s must have the same length")
        self.K = len(self.t)
        self.alpha = float(alpha)
        self.gamma = float(gamma)
        self.delta = float(delta)
        self.lam_shapes = self.alpha + self.s_counts
        self.beta_shape = self.gamma + self.K * self.alpha

    def _validate(self, state) -> np.ndarray:
        state = np.asarray(state, dtype=float)
        if state.shape != (self.K + 1,) or np.any(state <= 0):
            raise ValueError("state must be K positive rates followed by a positive beta")
        return state

    def single_step(self, x, s: RngStream):
        x = self._validate(x)
        new = np.empty_like(x)
        beta = x[-1]
        for n in range(self.K):
            new[n] = s.gamma(self.lam_shapes[n], beta + self.t[n])
        new[-1] = s.gamma(self.beta_shape, self.delta + new[:-1].sum())
        return new

    def coupled_step(self, x, y, s: RngStream):
        x = self._validate(x)
        y = self._validate(y)
        new_x = np.empty_like(x)
        new_y = np.empty_like(y)
        beta_x, beta_y = x[-1], y[-1]
        for n in range(self.K):
            out = maximal_coupling(
                gamma_density_and_sampler(self.lam_shapes[n], beta_x + self.t[n]),
                gamma_density_and_sampler(self.lam_shapes[n], beta_y + self.t[n]),
                s,
            )
            new_x[n], new_y[n] = out.x, out.y
        out = maximal_coupling(
            gamma_density_and_sampler(self.beta_shape, self.delta + new_x[:-1].sum()),
            gamma_density_and_sampler(self.beta_shape, self.delta + new_y[:-1].sum()),
            s,
        )
        new_x[-1], new_y[-1] = out.x, out.y
        return new_x, new_y, states_equal(new_x, new_y)
