"""Coupled-chain runs and the unbiased time-averaged estimator.

A run draws two starts from the initial distribution, advances the first
chain one step, then alternates coupled transitions until the chains meet
at the random time ``tau`` (the first ``t >= 1`` with ``X_t == Y_{t-1}``)
and single transitions afterwards, up to ``max(m, tau)`` total steps.
From one run, ``h_k`` evaluates the bias-corrected estimator at a single
burn-in ``k``, and ``h_km`` the average of those over ``k..m`` in its
rearranged single-pass form; both are unbiased for the target expectation
of ``h`` at any ``k``.

Cost convention (documented, fixed): a run makes ``tau - 1`` coupled calls
and ``1 + max(0, m - tau)`` single calls, and one coupled call is billed as
two single ones, so ``cost = 2 (tau - 1) + 1 + max(0, m - tau)``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .kernels.base import CoupledKernel, states_equal
from .rng import RngStream

__all__ = [
    "CoupledRun",
    "EstimateReport",
    "MeetingTimeout",
    "run_coupled",
    "unbiased_estimate",
    "UnbiasedResult",
    "h_k",
    "h_km",
    "h_values",
    "h_k_from_values",
    "h_km_from_values",
    "aggregate",
    "write_replicates_csv",
]

DEFAULT_MAX_ITER = 10**7


class MeetingTimeout(RuntimeError):
    """The chains did not meet within ``max_iter`` steps.

    Raised loudly instead of truncating: an estimator computed from a
    stopped-short run is no longer unbiased.  ``partial_run`` holds the
    trajectory so far (``tau`` is None).
    """

    def __init__(self, message: str, partial_run: "CoupledRun"):
        super().__init__(message)
        self.partial_run = partial_run


@dataclass
class CoupledRun:
    """Recorded trajectories X_0..X_T and Y_0..Y_{T-1}, with T = max(m, tau)."""

    x_states: list
    y_states: list
    tau: Optional[int]
    m: int
    calls_coupled: int
    calls_single: int

    @property
    def T(self) -> int:
        return len(self.x_states) - 1

    @property
    def cost(self) -> int:
        return 2 * self.calls_coupled + self.calls_single


def run_coupled(
    kernel: CoupledKernel,
    init_sampler: Callable[[RngStream], object],
    k: int,
    m: int,
    s: RngStream,
    max_iter: int = DEFAULT_MAX_ITER,
) -> CoupledRun:
    """Run a coupled pair until ``max(m, tau)`` and record everything."""
    _check_km(k, m, max_iter)
    x0 = init_sampler(s)
    y0 = init_sampler(s)  # independent second draw
    xs = [x0, kernel.single_step(x0, s)]
    ys = [y0]
    calls_single = 1
    calls_coupled = 0
    tau = 1 if states_equal(xs[1], ys[0]) else None
    t = 1
    while tau is None or t < m:
        if tau is None:
            if t >= max_iter:
                raise MeetingTimeout(
                    f"no meeting within max_iter={max_iter} steps",
                    CoupledRun(xs, ys, None, m, calls_coupled, calls_single),
                )
            x_new, y_new, met = kernel.coupled_step(xs[-1], ys[-1], s)
            calls_coupled += 1
            t += 1
            if met:
                tau = t
        else:
            x_new = kernel.single_step(xs[-1], s)
            y_new = x_new  # faithful: the chains move together after meeting
            calls_single += 1
            t += 1
        xs.append(x_new)
        ys.append(y_new)
    return CoupledRun(xs, ys, tau, m, calls_coupled, calls_single)


def _check_km(k: int, m: int, max_iter: int = DEFAULT_MAX_ITER):
    if k < 0:
        raise ValueError("k must be nonnegative")
    if m < k:
        raise ValueError("m must be >= k")
    if max_iter <= m:
        raise ValueError("max_iter must exceed m")


def _require_met(run: CoupledRun) -> int:
    if run.tau is None:
        raise ValueError("run did not meet; estimator undefined")
    return run.tau


def h_k(run: CoupledRun, h: Callable, k: int):
    """Bias-corrected estimator h(X_k) + sum_{t=k+1}^{tau-1} (h(X_t) - h(Y_{t-1}))."""
    tau = _require_met(run)
    if k < 0 or k > run.T:
        raise ValueError(f"run of length T={run.T} does not cover k={k}")
    value = h(run.x_states[k])
    for t in range(k + 1, tau):
        value = value + (h(run.x_states[t]) - h(run.y_states[t - 1]))
    return value


def h_km(run: CoupledRun, h: Callable, k: int, m: int):
    """Time-averaged estimator over burn-in ``k`` and horizon ``m``.

    Computed in the rearranged form: MCMC average of h(X_k..X_m) plus the
    weighted bias correction; equals the plain average of ``h_k .. h_m``.
    """
    tau = _require_met(run)
    _check_km(k, m)
    if m > run.T:
        raise ValueError(f"run of length T={run.T} does not cover m={m}")
    span = m - k + 1
    total = h(run.x_states[k])
    for ell in range(k + 1, m + 1):
        total = total + h(run.x_states[ell])
    value = total / span
    for ell in range(k, tau):
        weight = min(1.0, (ell - k + 1) / span)
        value = value + weight * (h(run.x_states[ell + 1]) - h(run.y_states[ell]))
    return value


def h_values(run: CoupledRun, h: Callable) -> tuple[np.ndarray, np.ndarray]:
    """Apply a scalar test function along both stored trajectories."""
    hx = np.asarray([h(x) for x in run.x_states], dtype=float)
    hy = np.asarray([h(y) for y in run.y_states], dtype=float)
    return hx, hy


def h_k_from_values(hx: np.ndarray, hy: np.ndarray, tau: int, k: int) -> float:
    """Vectorized ``h_k`` from precomputed scalar trajectories."""
    if k < 0 or k >= len(hx):
        raise ValueError("trajectory does not cover k")
    return float(hx[k] + (hx[k + 1 : tau] - hy[k : tau - 1]).sum())


def h_km_from_values(hx: np.ndarray, hy: np.ndarray, tau: int, k: int, m: int) -> float:
    """Vectorized ``h_km`` from precomputed scalar trajectories."""
    _check_km(k, m)
    if m >= len(hx):
        raise ValueError("trajectory does not cover m")
    span = m - k + 1
    value = float(hx[k : m + 1].sum()) / span
    if tau > k:
        ells = np.arange(k, tau)
        weights = np.minimum(1.0, (ells - k + 1) / span)
        value += float(weights @ (hx[ells + 1] - hy[ells]))
    return value


@dataclass
class UnbiasedResult:
    value: object
    tau: int
    calls_coupled: int
    calls_single: int

    @property
    def cost(self) -> int:
        return 2 * self.calls_coupled + self.calls_single


def unbiased_estimate(
    kernel: CoupledKernel,
    init_sampler: Callable[[RngStream], object],
    h: Callable,
    k: int,
    m: int,
    s: RngStream,
    max_iter: int = DEFAULT_MAX_ITER,
) -> UnbiasedResult:
    """Streaming ``h_km``: same draws and same value as a stored run, O(1) memory."""
    _check_km(k, m, max_iter)
    span = m - k + 1
    x0 = init_sampler(s)
    y0 = init_sampler(s)
    x = kernel.single_step(x0, s)
    y = y0
    calls_single = 1
    calls_coupled = 0
    tau = 1 if states_equal(x, y0) else None
    t = 1
    total = h(x0) if k == 0 else 0.0
    if t >= k and t <= m:
        total = total + h(x)
    correction = 0.0
    if tau is None and t - 1 >= k:  # pair (X_1, Y_0); only possible when k == 0
        correction = correction + min(1.0, (t - 1 - k + 1) / span) * (h(x) - h(y))
    while tau is None or t < m:
        if tau is None:
            if t >= max_iter:
                raise MeetingTimeout(
                    f"no meeting within max_iter={max_iter} steps",
                    CoupledRun([x], [y], None, m, calls_coupled, calls_single),
                )
            x, y, met = kernel.coupled_step(x, y, s)
            calls_coupled += 1
            t += 1
            if met:
                tau = t
            elif t - 1 >= k:
                correction = correction + min(1.0, (t - 1 - k + 1) / span) * (h(x) - h(y))
        else:
            x = kernel.single_step(x, s)
            calls_single += 1
            t += 1
        if k <= t <= m:
            total = total + h(x)
    return UnbiasedResult(
        value=total / span + correction,
        tau=tau,
        calls_coupled=calls_coupled,
        calls_single=calls_single,
    )


@dataclass
class EstimateReport:
    """CLT summary of independent replicates: mean, variance, CI, cost, inefficiency."""

    mean: np.ndarray
    sample_variance: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray
    R: int
    mean_cost: float
    inefficiency: np.ndarray
    z: float = field(default=1.96)


def aggregate(values: Sequence, costs: Sequence[float], z: float = 1.96) -> EstimateReport:
    """Combine R independent replicate estimates (index order fixed)."""
    stacked = np.asarray([np.asarray(v, dtype=float) for v in values])
    R = stacked.shape[0]
    if R < 2:
        raise ValueError("need at least two replicates to estimate a variance")
    mean = stacked.mean(axis=0)
    variance = stacked.var(axis=0, ddof=1)
    half_width = z * np.sqrt(variance / R)
    mean_cost = float(np.mean(np.asarray(costs, dtype=float)))
    return EstimateReport(
        mean=mean,
        sample_variance=variance,
        ci_low=mean - half_width,
        ci_high=mean + half_width,
        R=R,
        mean_cost=mean_cost,
        inefficiency=mean_cost * variance,
        z=z,
    )


def write_replicates_csv(path, taus, costs, values_by_name: dict):
    """Replicate table: replicate_id, tau, cost, one column per test function."""
    names = list(values_by_name)
    columns = [np.asarray(values_by_name[n], dtype=float) for n in names]
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["replicate_id", "tau", "cost", *names])
        for r, (tau, cost) in enumerate(zip(taus, costs)):
            writer.writerow([r, tau, cost, *(f"{col[r]:.17g}" for col in columns)])
