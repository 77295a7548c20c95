"""Signed empirical measures and what can be read off them.

``signed_measure`` rewrites the time-averaged estimator as weighted atoms:
uniform weights on X_k..X_m plus paired positive/negative correction atoms
up to the meeting time.  Weights always sum to one but single weights may
be negative, so the pooled "CDF" need not be monotone; quantile estimation
therefore reports every crossing index.  Histogram estimates inherit
unbiasedness bin by bin and are deliberately not clipped at zero.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .estimators import CoupledRun, _check_km, _require_met

__all__ = [
    "SignedMeasure",
    "signed_measure",
    "pooled_atoms",
    "EcdfResult",
    "ecdf_and_quantile",
    "ecdf_on_grid",
    "HistogramResult",
    "histogram",
    "measure_to_json",
    "measure_from_json",
]

_WEIGHT_SUM_TOL = 1e-10


@dataclass
class SignedMeasure:
    """Weighted atoms (weights may be negative; they sum to one)."""

    weights: np.ndarray  # (N,)
    atoms: np.ndarray  # (N,) univariate or (N, d)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        self.atoms = np.asarray(self.atoms)
        if len(self.weights) != len(self.atoms):
            raise ValueError("weights and atoms must align")
        if abs(self.weights.sum() - 1.0) > _WEIGHT_SUM_TOL:
            raise ValueError("weights must sum to 1")

    def integrate(self, h: Callable) -> float:
        return float(sum(w * h(z) for w, z in zip(self.weights, self.atoms)))

    def coordinate(self, index: int) -> np.ndarray:
        if self.atoms.ndim == 1:
            if index != 0:
                raise ValueError("univariate atoms have only coordinate 0")
            return self.atoms
        return self.atoms[:, index]


def signed_measure(run: CoupledRun, k: int, m: int) -> SignedMeasure:
    """Atom form of ``h_km``: integrating any h against it equals h_km(run, h, k, m)."""
    tau = _require_met(run)
    _check_km(k, m)
    if m > run.T:
        raise ValueError(f"run of length T={run.T} does not cover m={m}")
    span = m - k + 1
    weights = [1.0 / span] * span
    atoms = list(run.x_states[k : m + 1])
    for ell in range(k, tau):
        w = min(1.0, (ell - k + 1) / span)
        weights.append(w)
        atoms.append(run.x_states[ell + 1])
        weights.append(-w)
        atoms.append(run.y_states[ell])
    return SignedMeasure(weights=np.asarray(weights), atoms=np.asarray(atoms))


def pooled_atoms(measures: Sequence[SignedMeasure], coordinate: int = 0):
    """Pool R replicate measures with weights 1/R each; atoms sorted by value."""
    if len(measures) == 0:
        raise ValueError("no measures to pool")
    R = len(measures)
    values = np.concatenate([mu.coordinate(coordinate) for mu in measures])
    weights = np.concatenate([mu.weights for mu in measures]) / R
    order = np.argsort(values, kind="stable")
    return values[order], weights[order]


@dataclass
class EcdfResult:
    atoms: np.ndarray  # sorted atom locations
    cdf: np.ndarray  # cumulative weight just after each atom
    crossing_indices: np.ndarray  # every index where the cumulative sum crosses q
    quantile: float  # smallest crossing atom (canonical point estimate)


def ecdf_and_quantile(measures: Sequence[SignedMeasure], q: float,
                      coordinate: int = 0) -> EcdfResult:
    """Pooled signed ECDF and the q-th quantile estimate(s).

    Because weights can be negative the cumulative sum may cross ``q``
    several times; all crossing indices are reported and the smallest
    crossing atom is the canonical estimate.
    """
    if not (0.0 < q < 1.0):
        raise ValueError("q must lie strictly between 0 and 1")
    values, weights = pooled_atoms(measures, coordinate)
    cdf = np.cumsum(weights)
    before = cdf - weights  # cumulative sum strictly before each atom
    crossings = np.flatnonzero((before <= q) & (cdf > q))
    if len(crossings) == 0:
        crossings = np.asarray([len(values) - 1])
    return EcdfResult(
        atoms=values,
        cdf=cdf,
        crossing_indices=crossings,
        quantile=float(values[crossings[0]]),
    )


def ecdf_on_grid(measures: Sequence[SignedMeasure], grid: np.ndarray,
                 coordinate: int = 0) -> np.ndarray:
    """Evaluate the pooled signed ECDF at the given grid points."""
    values, weights = pooled_atoms(measures, coordinate)
    cdf = np.cumsum(weights)
    idx = np.searchsorted(values, grid, side="right")
    out = np.empty(len(grid))
    out[idx == 0] = 0.0
    nonzero = idx > 0
    out[nonzero] = cdf[idx[nonzero] - 1]
    return out


@dataclass
class HistogramResult:
    breaks: np.ndarray
    estimate: np.ndarray  # may be negative; never clipped
    ci_low: np.ndarray
    ci_high: np.ndarray
    per_replicate: np.ndarray  # (R, bins) unbiased bin-mass estimates


def histogram(measures: Sequence[SignedMeasure], coordinate: int,
              breaks: np.ndarray, z: float = 1.96) -> HistogramResult:
    """Unbiased bin-mass estimates with CLT confidence intervals per bin."""
    breaks = np.asarray(breaks, dtype=float)
    if len(breaks) < 2 or np.any(np.diff(breaks) <= 0):
        raise ValueError("breaks must be strictly increasing with at least two edges")
    rows = []
    for mu in measures:
        row, _ = np.histogram(mu.coordinate(coordinate), bins=breaks, weights=mu.weights)
        rows.append(row)
    per_replicate = np.asarray(rows)
    R = len(rows)
    estimate = per_replicate.mean(axis=0)
    if R >= 2:
        half = z * np.sqrt(per_replicate.var(axis=0, ddof=1) / R)
    else:
        half = np.full_like(estimate, np.nan)
    return HistogramResult(
        breaks=breaks,
        estimate=estimate,
        ci_low=estimate - half,
        ci_high=estimate + half,
        per_replicate=per_replicate,
    )


def measure_to_json(measure: SignedMeasure) -> str:
    """Serialize as a list of [weight, coordinate...] rows."""
    atoms = np.atleast_2d(measure.atoms.T).T  # (N, d) view, d=1 for univariate
    rows = [[w, *map(float, z)] for w, z in zip(measure.weights.tolist(), atoms)]
    return json.dumps(rows)


def measure_from_json(text: str) -> SignedMeasure:
    rows = json.loads(text)
    weights = np.asarray([r[0] for r in rows])
    atoms = np.asarray([r[1:] for r in rows])
    if atoms.shape[1] == 1:
        atoms = atoms[:, 0]
    return SignedMeasure(weights=weights, atoms=atoms)
