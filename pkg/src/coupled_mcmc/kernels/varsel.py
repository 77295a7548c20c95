"""Bayesian variable selection: discrete flip/swap kernels and their coupling.

The target is the posterior over inclusion vectors gamma in {0,1}^p under a
g-prior marginal likelihood and a sparsity prior p^(-kappa |gamma|) 1(|gamma| <= s0).
The marginal kernel mixes a single-coordinate flip move with an
include/exclude swap move, each Metropolis-corrected.  The coupled kernel
shares the mixture choice and acceptance uniforms, proposes flips at a
common coordinate, and draws swap indices from maximal couplings of the
uniform distributions over the chains' zero- and one-sets.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..couplings import maximal_coupling_discrete
from ..rng import RngStream
from .base import CoupledKernel, log_uniform, states_equal

__all__ = ["VarSelModel", "VariableSelection"]

_CACHE_LIMIT = 200_000


@dataclass(frozen=True)
class VarSelModel:
    """Design matrix, response, and prior hyperparameters."""

    X: np.ndarray
    Y: np.ndarray
    g: float
    kappa: float
    s0: int

    def __post_init__(self):
        if self.X.ndim != 2 or len(self.Y) != self.X.shape[0]:
            raise ValueError("X must be n x p with Y of length n")
        if self.g <= 0 or not (1 <= self.s0 <= self.X.shape[1]):
            raise ValueError("need g > 0 and 1 <= s0 <= p")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


class VariableSelection(CoupledKernel):
    def __init__(self, model: VarSelModel):
        self.model = model
        self._XtX = model.X.T @ model.X
        self._XtY = model.X.T @ model.Y
        self._YtY = float(model.Y @ model.Y)
        self._log_1pg = math.log1p(model.g)
        self._log_p = math.log(model.p)
        self._cache: dict[bytes, float] = {}

    # posterior evaluation -------------------------------------------------

    def r_squared(self, gamma: np.ndarray) -> float:
        idx = np.flatnonzero(gamma)
        if len(idx) == 0:
            return 0.0
        sub = self._XtX[np.ix_(idx, idx)]
        b = self._XtY[idx]
        return float(b @ np.linalg.solve(sub, b)) / self._YtY

    def log_posterior(self, gamma: np.ndarray) -> float:
        """Unnormalized log posterior of an inclusion vector."""
        size = int(gamma.sum())
        if size > self.model.s0:
            return -math.inf
        key = gamma.tobytes()
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        n, g, kappa = self.model.n, self.model.g, self.model.kappa
        value = (
            -0.5 * size * self._log_1pg
            - 0.5 * n * math.log1p(g * (1.0 - self.r_squared(gamma)))
            - kappa * size * self._log_p
        )
        if len(self._cache) >= _CACHE_LIMIT:
            self._cache.clear()
        self._cache[key] = value
        return value

    # proposals ------------------------------------------------------------

    def _validate(self, gamma) -> np.ndarray:
        gamma = np.asarray(gamma, dtype=np.uint8)
        if gamma.shape != (self.model.p,):
            raise ValueError("state must be a length-p binary vector")
        if int(gamma.sum()) > self.model.s0:
            raise ValueError("state violates the sparsity bound |gamma| <= s0")
        return gamma

    @staticmethod
    def _flip(gamma: np.ndarray, i: int) -> np.ndarray:
        out = gamma.copy()
        out[i] = 1 - out[i]
        return out

    @staticmethod
    def _swap(gamma: np.ndarray, i0: int, i1: int) -> np.ndarray:
        out = gamma.copy()
        out[i0], out[i1] = 1, 0
        return out

    def _uniform_index(self, indices: np.ndarray, s: RngStream) -> int:
        return int(indices[min(int(s.uniform() * len(indices)), len(indices) - 1)])

    def _set_distribution(self, indices: np.ndarray) -> np.ndarray:
        w = np.zeros(self.model.p)
        w[indices] = 1.0 / len(indices)
        return w

    def _accept(self, gamma: np.ndarray, proposal: np.ndarray, log_u: float) -> np.ndarray:
        if log_u <= self.log_posterior(proposal) - self.log_posterior(gamma):
            return proposal
        return gamma

    # transitions ----------------------------------------------------------

    def single_step(self, x, s: RngStream):
        gamma = self._validate(x)
        if s.uniform() < 0.5:
            i = min(int(s.uniform() * self.model.p), self.model.p - 1)
            return self._accept(gamma, self._flip(gamma, i), log_uniform(s))
        size = int(gamma.sum())
        if size == 0 or size == self.model.p:
            return gamma
        i0 = self._uniform_index(np.flatnonzero(gamma == 0), s)
        i1 = self._uniform_index(np.flatnonzero(gamma == 1), s)
        return self._accept(gamma, self._swap(gamma, i0, i1), log_uniform(s))

    def coupled_step(self, x, y, s: RngStream):
        gx = self._validate(x)
        gy = self._validate(y)
        if s.uniform() < 0.5:  # common mixture choice
            i = min(int(s.uniform() * self.model.p), self.model.p - 1)
            log_u = log_uniform(s)
            new_x = self._accept(gx, self._flip(gx, i), log_u)
            new_y = self._accept(gy, self._flip(gy, i), log_u)
        else:
            new_x, new_y = self._coupled_swap(gx, gy, s)
        return new_x, new_y, states_equal(new_x, new_y)

    def _coupled_swap(self, gx: np.ndarray, gy: np.ndarray, s: RngStream):
        size_x, size_y = int(gx.sum()), int(gy.sum())
        x_moves = 0 < size_x < self.model.p
        y_moves = 0 < size_y < self.model.p
        if not x_moves and not y_moves:
            return gx, gy
        if x_moves and y_moves:
            i0, j0 = maximal_coupling_discrete(
                self._set_distribution(np.flatnonzero(gx == 0)),
                self._set_distribution(np.flatnonzero(gy == 0)),
                s,
            )
            i1, j1 = maximal_coupling_discrete(
                self._set_distribution(np.flatnonzero(gx == 1)),
                self._set_distribution(np.flatnonzero(gy == 1)),
                s,
            )
            log_u = log_uniform(s)
            return (
                self._accept(gx, self._swap(gx, i0, i1), log_u),
                self._accept(gy, self._swap(gy, j0, j1), log_u),
            )
        # one chain is stuck at an extreme state: it stays put while the
        # other proposes on its own, preserving both marginals
        mover, stay = (gx, gy) if x_moves else (gy, gx)
        i0 = self._uniform_index(np.flatnonzero(mover == 0), s)
        i1 = self._uniform_index(np.flatnonzero(mover == 1), s)
        moved = self._accept(mover, self._swap(mover, i0, i1), log_uniform(s))
        return (moved, stay) if x_moves else (stay, moved)
