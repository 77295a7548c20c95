"""Random-walk Metropolis--Hastings, single and coupled.

The coupled transition draws the two proposals from a maximal coupling of
the proposal distributions centered at the two current states, then uses
one common uniform for both acceptance decisions.  Proposals that meet and
are jointly accepted make the chains meet exactly.
"""
from __future__ import annotations

import math

import numpy as np

from ..couplings import DensityAndSampler, maximal_coupling
from ..rng import RngStream
from ..targets import TargetModel
from .base import CoupledKernel, log_accept_ratio, log_uniform, mh_accept, states_equal

__all__ = ["GaussianProposal", "RandomWalkMetropolis", "MetropolisWithinGibbs",
           "rwmh_single", "rwmh_coupled"]

_LOG_2PI = math.log(2.0 * math.pi)


class GaussianProposal:
    """N(center, cov) with a precomputed Cholesky factor.

    Scalar mode (``dim == 1``) keeps states as plain floats for speed;
    vector mode uses numpy arrays.  ``centered_at`` returns the normalized
    density/sampler pair fed to the maximal coupling.
    """

    def __init__(self, cov, dim: int):
        self.dim = dim
        if dim == 1:
            sd = math.sqrt(float(np.asarray(cov).reshape(())))
            if not sd > 0:
                raise ValueError("proposal variance must be positive")
            self.sd = sd
            self._log_norm = -0.5 * _LOG_2PI - math.log(sd)
        else:
            cov = np.asarray(cov, dtype=float)
            if cov.shape != (dim, dim):
                raise ValueError("proposal covariance has wrong shape")
            try:
                self.chol = np.linalg.cholesky(cov)
            except np.linalg.LinAlgError as e:
                raise ValueError("proposal covariance must be symmetric positive definite") from e
            self._chol_inv = np.linalg.inv(self.chol)
            self._log_norm = -0.5 * dim * _LOG_2PI - float(np.log(np.diag(self.chol)).sum())

    def centered_at(self, center) -> DensityAndSampler:
        if self.dim == 1:
            sd, log_norm = self.sd, self._log_norm

            def log_density(z: float) -> float:
                u = (z - center) / sd
                return log_norm - 0.5 * u * u

            def sampler(s: RngStream) -> float:
                return center + sd * s.normal()

        else:
            chol, chol_inv, log_norm = self.chol, self._chol_inv, self._log_norm

            def log_density(z) -> float:
                u = chol_inv @ (z - center)
                return log_norm - 0.5 * float(u @ u)

            def sampler(s: RngStream):
                return center + chol @ s.normal(size=len(center))

        return DensityAndSampler(log_density=log_density, sampler=sampler)

    def draw(self, center, s: RngStream):
        if self.dim == 1:
            return center + self.sd * s.normal()
        return center + self.chol @ s.normal(size=self.dim)


class RandomWalkMetropolis(CoupledKernel):
    """Symmetric Gaussian random-walk MH and its maximally coupled pair."""

    def __init__(self, target: TargetModel, proposal_cov, max_rejections: int = 10**8):
        self.target = target
        self.proposal = GaussianProposal(proposal_cov, target.dim)
        self.max_rejections = max_rejections

    def single_step(self, x, s: RngStream):
        proposal = self.proposal.draw(x, s)
        if mh_accept(log_accept_ratio(self.target.log_target, x, proposal), log_uniform(s)):
            return proposal
        return x

    def coupled_step(self, x, y, s: RngStream):
        out = maximal_coupling(
            self.proposal.centered_at(x),
            self.proposal.centered_at(y),
            s,
            max_rejections=self.max_rejections,
        )
        log_u = log_uniform(s)  # one common uniform for both decisions
        log_t = self.target.log_target
        x_new = out.x if log_u <= log_t(out.x) - log_t(x) else x
        y_new = out.y if log_u <= log_t(out.y) - log_t(y) else y
        return x_new, y_new, states_equal(x_new, y_new)


def rwmh_single(target: TargetModel, proposal_cov, x, s: RngStream):
    """One marginal random-walk MH transition (convenience wrapper)."""
    return RandomWalkMetropolis(target, proposal_cov).single_step(x, s)


def rwmh_coupled(target: TargetModel, proposal_cov, x, y, s: RngStream):
    """One coupled random-walk MH transition (convenience wrapper)."""
    return RandomWalkMetropolis(target, proposal_cov).coupled_step(x, y, s)


class MetropolisWithinGibbs(CoupledKernel):
    """Systematic scan of coupled univariate MH updates, one coordinate at a time.

    Each coordinate receives ``steps_per_coordinate`` updates with a
    N(0, sd^2) proposal on that coordinate, all other coordinates held
    fixed; the coupled version maximally couples the univariate proposals
    and shares the acceptance uniform.
    """

    def __init__(self, target: TargetModel, proposal_sd: float = 1.0,
                 steps_per_coordinate: int = 1):
        if proposal_sd <= 0:
            raise ValueError("proposal_sd must be positive")
        if steps_per_coordinate < 1:
            raise ValueError("steps_per_coordinate must be >= 1")
        self.target = target
        self.sd = float(proposal_sd)
        self.steps = int(steps_per_coordinate)
        self._coord_proposal = GaussianProposal(self.sd**2, dim=1)

    def _propose(self, state: np.ndarray, i: int, value: float) -> np.ndarray:
        out = state.copy()
        out[i] = value
        return out

    def single_step(self, x, s: RngStream):
        log_t = self.target.log_target
        x = np.asarray(x, dtype=float).copy()
        log_px = float(log_t(x))
        for i in range(self.target.dim):
            for _ in range(self.steps):
                proposal = self._propose(x, i, x[i] + self.sd * s.normal())
                log_pp = float(log_t(proposal))
                if log_uniform(s) <= log_pp - log_px:
                    x, log_px = proposal, log_pp
        return x

    def coupled_step(self, x, y, s: RngStream):
        log_t = self.target.log_target
        x = np.asarray(x, dtype=float).copy()
        y = np.asarray(y, dtype=float).copy()
        log_px, log_py = float(log_t(x)), float(log_t(y))
        for i in range(self.target.dim):
            for _ in range(self.steps):
                out = maximal_coupling(
                    self._coord_proposal.centered_at(float(x[i])),
                    self._coord_proposal.centered_at(float(y[i])),
                    s,
                )
                log_u = log_uniform(s)
                prop_x = self._propose(x, i, out.x)
                log_ppx = float(log_t(prop_x))
                if log_u <= log_ppx - log_px:
                    x, log_px = prop_x, log_ppx
                prop_y = self._propose(y, i, out.y)
                log_ppy = float(log_t(prop_y))
                if log_u <= log_ppy - log_py:
                    y, log_py = prop_y, log_ppy
        return x, y, states_equal(x, y)
