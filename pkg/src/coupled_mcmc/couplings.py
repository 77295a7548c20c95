"""Couplings of pairs of distributions.

The workhorse is :func:`maximal_coupling`, which draws a pair ``(x, y)``
with prescribed marginals ``p`` and ``q`` while maximizing the probability
of the event ``x == y``: the pair is equal with probability exactly
``1 - d_TV(p, q)``, and its expected cost is two units (one unit = one draw
plus two density evaluations) regardless of the distributions involved.

Also provided: an O(N) maximal coupling of discrete distributions, a
common-random-numbers pairing, and the univariate quantile (increasing
rearrangement) coupling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .rng import RngStream

__all__ = [
    "DensityAndSampler",
    "CouplingOutcome",
    "RunawayCouplingError",
    "maximal_coupling",
    "maximal_coupling_discrete",
    "crn_pair",
    "quantile_coupling",
]

_NORMALIZATION_TOL = 1e-12


class RunawayCouplingError(RuntimeError):
    """The rejection loop failed to terminate within its guard.

    Almost surely signals a mismatch between a log-density and its sampler
    (the loop terminates with probability one when they agree).
    """


class DensityAndSampler(NamedTuple):
    """A normalized density (in log space) together with an exact sampler.

    Both fields must describe the same distribution, with the same
    normalization on both sides of a coupling: comparing ``p`` and ``q``
    with inconsistent constants silently destroys maximality.
    """

    log_density: Callable[[object], float]
    sampler: Callable[[RngStream], object]


@dataclass
class CouplingOutcome:
    x: object
    y: object
    met: bool
    cost: int = 0  # units of one draw + two density evaluations


def maximal_coupling(
    p: DensityAndSampler,
    q: DensityAndSampler,
    s: RngStream,
    max_rejections: int = 10**8,
) -> CouplingOutcome:
    """Sample ``(x, y)`` from a maximal coupling of ``p`` and ``q``.

    Draws ``x ~ p`` and ``w`` uniform on ``[0, p(x)]``; if ``w <= q(x)``
    the pair has met and ``y`` is a copy of ``x``.  Otherwise ``y`` comes
    from the rejection loop: propose ``y* ~ q``, ``w*`` uniform on
    ``[0, q(y*)]``, until ``w* > p(y*)``.  All comparisons happen in log
    space to survive high-dimensional densities.

    ``met`` is True iff the outputs are bitwise identical, which the
    meeting branch guarantees by copying rather than recomputing.
    """
    x = p.sampler(s)
    cost = 1
    # log w = log p(x) + log u  <=>  w ~ U([0, p(x)])
    log_w = p.log_density(x) + math.log(s.uniform())
    if log_w <= q.log_density(x):
        return CouplingOutcome(x=x, y=x, met=True, cost=cost)
    for _ in range(max_rejections):
        y = q.sampler(s)
        cost += 1
        log_w = q.log_density(y) + math.log(s.uniform())
        if log_w > p.log_density(y):
            return CouplingOutcome(x=x, y=y, met=False, cost=cost)
    raise RunawayCouplingError(
        f"rejection loop exceeded {max_rejections} iterations; "
        "density and sampler are likely inconsistent"
    )


def _check_probability_vector(v: np.ndarray, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"{name} must be a 1-d probability vector")
    if np.any(v < 0):
        raise ValueError(f"{name} has negative entries")
    if abs(v.sum() - 1.0) > _NORMALIZATION_TOL:
        raise ValueError(f"{name} must sum to 1 within {_NORMALIZATION_TOL}")
    return v


def _sample_index(weights: np.ndarray, total: float, s: RngStream) -> int:
    # inversion sampling; one uniform consumed
    u = s.uniform() * total
    return int(np.searchsorted(np.cumsum(weights), u, side="right").clip(0, len(weights) - 1))


def maximal_coupling_discrete(q: np.ndarray, q_tilde: np.ndarray, s: RngStream) -> tuple[int, int]:
    """Maximally coupled pair of indices ``(i, j)`` with ``i ~ q``, ``j ~ q_tilde``.

    With probability ``alpha = sum_n min(q_n, q_tilde_n)`` a common index is
    drawn from the overlap ``min(q, q_tilde) / alpha`` and returned twice;
    otherwise the two indices are drawn independently from the residual
    distributions, whose supports are disjoint, so ``P(i = j) = alpha``
    exactly.  O(N) work.
    """
    q = _check_probability_vector(q, "q")
    q_tilde = _check_probability_vector(q_tilde, "q_tilde")
    if len(q) != len(q_tilde):
        raise ValueError("probability vectors must have equal length")
    overlap = np.minimum(q, q_tilde)
    alpha = float(overlap.sum())
    if alpha > 0 and (s.uniform() < alpha or 1.0 - alpha <= _NORMALIZATION_TOL):
        i = _sample_index(overlap, alpha, s)
        return i, i
    residual = q - overlap
    residual_tilde = q_tilde - overlap
    i = _sample_index(residual, residual.sum(), s)
    j = _sample_index(residual_tilde, residual_tilde.sum(), s)
    return i, j


def crn_pair(
    sampler_from_noise: Callable[[object, object], object],
    params_x,
    params_y,
    s: RngStream,
    noise_sampler: Callable[[RngStream], object] | None = None,
):
    """Common-random-numbers pair: one noise draw pushed through both parameter sets.

    ``noise_sampler`` defaults to a single standard normal.
    """
    noise = s.normal() if noise_sampler is None else noise_sampler(s)
    return sampler_from_noise(params_x, noise), sampler_from_noise(params_y, noise)


def quantile_coupling(
    inv_cdf_p: Callable[[float], float],
    inv_cdf_q: Callable[[float], float],
    s: RngStream,
) -> tuple[float, float]:
    """Increasing-rearrangement coupling: both inverse CDFs applied to one uniform."""
    u = s.uniform()
    return inv_cdf_p(u), inv_cdf_q(u)
