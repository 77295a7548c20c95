"""Meeting-time diagnostics: tuning k and m, TV bounds, tail rates.

Meeting times drive every tuning decision in this package: ``k`` is set to
a large empirical quantile of sampled meeting times, ``m`` to a multiple
of ``k``, and the same samples yield an upper bound curve on the total
variation distance between the chain at step k and its target.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .estimators import MeetingTimeout, run_coupled
from .kernels.base import CoupledKernel
from .rng import RngStream, StreamFactory

__all__ = [
    "MeetingTimeSample",
    "sample_meeting_times",
    "choose_k_m",
    "tv_upper_bound",
    "survival_curve",
    "GeometricTailFit",
    "fit_geometric_tail",
    "write_curve_csv",
]


@dataclass
class MeetingTimeSample:
    taus: np.ndarray
    R: int
    label: str = ""
    timed_out: tuple = ()  # replicate ids that hit the iteration guard

    def __post_init__(self):
        self.taus = np.asarray(self.taus, dtype=int)
        if len(self.taus) and self.taus.min() < 1:
            raise ValueError("meeting times must be >= 1")


def sample_meeting_times(
    kernel: CoupledKernel,
    init_sampler: Callable[[RngStream], object],
    R: int,
    factory: StreamFactory,
    role: str = "meet",
    max_iter: int = 10**7,
    label: str = "",
) -> MeetingTimeSample:
    """R independent runs with m = 0: advance only until the chains meet."""
    if R < 1:
        raise ValueError("R must be >= 1")
    taus = []
    timed_out = []
    for r in range(R):
        stream = factory.stream(r, role)
        try:
            run = run_coupled(kernel, init_sampler, k=0, m=0, s=stream, max_iter=max_iter)
        except MeetingTimeout:
            timed_out.append(r)
            continue
        taus.append(run.tau)
    return MeetingTimeSample(taus=np.asarray(taus, dtype=int), R=R, label=label,
                             timed_out=tuple(timed_out))


def empirical_quantile(values: np.ndarray, q: float) -> float:
    """Type-1 (inverted CDF) empirical quantile."""
    ordered = np.sort(np.asarray(values))
    idx = max(int(math.ceil(q * len(ordered))) - 1, 0)
    return float(ordered[idx])


def choose_k_m(sample: MeetingTimeSample, quantile: float = 0.99,
               multiplier: int = 10) -> tuple[int, int]:
    """k = ceiling of the tau quantile (conservative), m = multiplier * k."""
    if len(sample.taus) == 0:
        raise ValueError("empty meeting-time sample")
    if multiplier < 1:
        raise ValueError("multiplier must be a positive integer")
    k = int(math.ceil(empirical_quantile(sample.taus, quantile)))
    return k, multiplier * k


def tv_upper_bound(sample: MeetingTimeSample, k_grid) -> np.ndarray:
    """Curve of (k, min(1, E[max(0, tau - k + 1)])); nonincreasing in k."""
    taus = sample.taus.astype(float)
    rows = []
    for k in k_grid:
        bound = min(1.0, float(np.maximum(0.0, taus - k + 1.0).mean()))
        rows.append((int(k), bound))
    return np.asarray(rows, dtype=float)


def survival_curve(sample: MeetingTimeSample) -> np.ndarray:
    """(t, P_hat(tau > t)) for t = 0..max(tau)."""
    taus = sample.taus
    ts = np.arange(0, taus.max() + 1)
    surv = np.asarray([(taus > t).mean() for t in ts])
    return np.column_stack([ts, surv])


@dataclass
class GeometricTailFit:
    rate: Optional[float]  # survival decay per step; None when degenerate
    r_squared: Optional[float]
    degenerate: bool
    t_window: tuple = ()


def fit_geometric_tail(sample: MeetingTimeSample) -> GeometricTailFit:
    """Least-squares slope of the log survival over [median, 99% quantile].

    The lower half of the sample is excluded: geometric decay is a tail
    property and early times are pre-asymptotic.
    """
    taus = sample.taus
    if len(taus) < 100:
        raise ValueError("need at least 100 meeting times for a tail fit")
    if taus.min() == taus.max():
        return GeometricTailFit(rate=None, r_squared=None, degenerate=True)
    lo = int(empirical_quantile(taus, 0.5))
    hi = int(empirical_quantile(taus, 0.99))
    ts = []
    log_surv = []
    for t in range(lo, hi + 1):
        p = float((taus > t).mean())
        if p > 0.0:
            ts.append(float(t))
            log_surv.append(math.log(p))
    if len(ts) < 2:
        return GeometricTailFit(rate=None, r_squared=None, degenerate=True)
    slope, intercept = np.polyfit(ts, log_surv, 1)
    fitted = slope * np.asarray(ts) + intercept
    residual = np.asarray(log_surv) - fitted
    total = np.asarray(log_surv) - np.mean(log_surv)
    ss_tot = float(total @ total)
    r2 = 1.0 - float(residual @ residual) / ss_tot if ss_tot > 0 else 1.0
    return GeometricTailFit(rate=math.exp(slope), r_squared=r2, degenerate=False,
                            t_window=(lo, hi))


def write_curve_csv(path, rows, header):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for row in np.asarray(rows):
            writer.writerow([f"{v:.17g}" for v in row])
