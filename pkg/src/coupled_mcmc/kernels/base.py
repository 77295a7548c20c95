"""Shared kernel machinery.

A coupled kernel advances a pair of chain states jointly and reports,
through the ``met`` flag, whether the outputs are bitwise equal.  Every
kernel here is faithful: equal inputs produce equal outputs, so chains
stay together forever once they meet.
"""
from __future__ import annotations

import math

import numpy as np

from ..rng import RngStream

__all__ = ["CoupledKernel", "states_equal", "log_accept_ratio", "mh_accept", "ThinnedKernel"]


def states_equal(a, b) -> bool:
    """Exact bitwise equality of two chain states (float or array)."""
    if type(a) is float and type(b) is float:
        return a == b
    return np.array_equal(a, b)


def log_accept_ratio(log_target, x, proposal) -> float:
    """Log Metropolis ratio for a symmetric proposal; caps at 0 (prob 1)."""
    r = log_target(proposal) - log_target(x)
    return 0.0 if r > 0.0 else r


def mh_accept(log_ratio: float, log_u: float) -> bool:
    """Metropolis decision: accept iff log u <= log acceptance ratio."""
    return log_u <= log_ratio


class CoupledKernel:
    """Contract: ``single_step`` is the marginal law of either output of
    ``coupled_step``, and ``coupled_step`` is faithful."""

    def single_step(self, x, s: RngStream):
        raise NotImplementedError

    def coupled_step(self, x, y, s: RngStream):
        raise NotImplementedError


class ThinnedKernel(CoupledKernel):
    """Composes ``thin`` base transitions into one logical step."""

    def __init__(self, base: CoupledKernel, thin: int):
        if thin < 1:
            raise ValueError("thin must be >= 1")
        self.base = base
        self.thin = thin

    def single_step(self, x, s: RngStream):
        for _ in range(self.thin):
            x = self.base.single_step(x, s)
        return x

    def coupled_step(self, x, y, s: RngStream):
        met = False
        for _ in range(self.thin):
            x, y, met = self.base.coupled_step(x, y, s)
        return x, y, met


def log_uniform(s: RngStream) -> float:
    return math.log(s.uniform())
