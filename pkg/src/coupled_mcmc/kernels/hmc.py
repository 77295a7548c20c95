"""Hamiltonian Monte Carlo coupled through common random numbers.

Sharing the momentum draw and the acceptance uniform makes a pair of HMC
chains contract toward each other on well-behaved targets, but contraction
alone never produces an exact meeting.  The kernel therefore mixes in a
small-step random-walk MH move (maximally coupled, so it can meet exactly)
with probability ``1 - hmc_prob``.
"""
from __future__ import annotations

import math

import numpy as np

from ..rng import RngStream
from ..targets import TargetModel
from .base import CoupledKernel, log_uniform, states_equal
from .rwmh import RandomWalkMetropolis

__all__ = ["leapfrog", "HmcRwmhMixture"]


def leapfrog(grad_log_target, q0, p0, step_size: float, n_steps: int):
    """Leapfrog integration of Hamiltonian dynamics with potential -log pi.

    Half-step on the momentum, ``n_steps - 1`` alternating full steps, a
    final position full-step and momentum half-step.  Deterministic.
    """
    if step_size <= 0 or n_steps < 1:
        raise ValueError("step_size must be positive and n_steps >= 1")
    q = np.array(q0, dtype=float)
    p = np.asarray(p0, dtype=float) + 0.5 * step_size * _grad(grad_log_target, q)
    for _ in range(n_steps - 1):
        q += step_size * p
        p += step_size * _grad(grad_log_target, q)
    q += step_size * p
    p += 0.5 * step_size * _grad(grad_log_target, q)
    return q, p


def _grad(grad_log_target, q):
    g = np.asarray(grad_log_target(q), dtype=float)
    if not np.all(np.isfinite(g)):
        raise FloatingPointError("non-finite gradient during leapfrog integration")
    return g


class HmcRwmhMixture(CoupledKernel):
    """HMC step with probability ``hmc_prob``, small-step coupled RWMH otherwise.

    The HMC branch shares one momentum draw and one acceptance uniform
    between the chains; the RWMH branch uses an isotropic proposal with
    variance ``mh_variance`` and is the move that produces exact meetings.
    """

    def __init__(self, target: TargetModel, step_size: float, n_steps: int = 20,
                 mh_variance: float = 1e-5, hmc_prob: float = 0.9):
        if target.grad_log_target is None:
            raise ValueError("HMC requires a target gradient")
        if not (0.0 <= hmc_prob <= 1.0):
            raise ValueError("hmc_prob must lie in [0, 1]")
        self.target = target
        self.step_size = float(step_size)
        self.n_steps = int(n_steps)
        self.hmc_prob = float(hmc_prob)
        self.rwmh = RandomWalkMetropolis(target, mh_variance * np.eye(target.dim))

    def _neg_hamiltonian(self, q, p) -> float:
        return float(self.target.log_target(q)) - 0.5 * float(np.dot(p, p))

    def _hmc_move(self, q, p0, log_u: float):
        q_new, p_new = leapfrog(self.target.grad_log_target, q, p0, self.step_size, self.n_steps)
        if log_u <= self._neg_hamiltonian(q_new, p_new) - self._neg_hamiltonian(q, p0):
            return q_new
        return np.asarray(q, dtype=float)

    def single_step(self, x, s: RngStream):
        if s.uniform() < self.hmc_prob:
            p0 = s.normal(size=self.target.dim)
            return self._hmc_move(x, p0, log_uniform(s))
        return self.rwmh.single_step(x, s)

    def coupled_step(self, x, y, s: RngStream):
        if s.uniform() < self.hmc_prob:  # one common branch choice
            p0 = s.normal(size=self.target.dim)  # common momentum
            log_u = log_uniform(s)  # common acceptance uniform
            x_new = self._hmc_move(x, p0, log_u)
            y_new = self._hmc_move(y, p0, log_u)
            return x_new, y_new, states_equal(x_new, y_new)
        return self.rwmh.coupled_step(x, y, s)
