"""Target distributions for the samplers and experiments.

A :class:`TargetModel` bundles the dimension, the (possibly unnormalized)
log density and an optional gradient.  Chains over one-dimensional targets
use plain floats as states; higher-dimensional targets use numpy vectors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .rng import RngStream

__all__ = [
    "TargetModel",
    "std_normal_target",
    "bimodal_mixture_target",
    "ar1_gaussian_target",
    "ar1_exact_draw",
    "gradient_matches_finite_differences",
]

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class TargetModel:
    dim: int
    log_target: Callable[[object], float]
    grad_log_target: Optional[Callable[[object], np.ndarray]] = None


def std_normal_target(dim: int = 1) -> TargetModel:
    if dim == 1:
        return TargetModel(
            dim=1,
            log_target=lambda x: -0.5 * x * x,
            grad_log_target=lambda x: -x,
        )
    return TargetModel(
        dim=dim,
        log_target=lambda x: -0.5 * float(np.dot(x, x)),
        grad_log_target=lambda x: -np.asarray(x, dtype=float),
    )


def bimodal_mixture_target(mu1: float = -4.0, mu2: float = 4.0, sd: float = 1.0,
                           w1: float = 0.5) -> TargetModel:
    """Mixture of two univariate normals, w1 N(mu1, sd^2) + (1-w1) N(mu2, sd^2)."""
    log_w1 = math.log(w1)
    log_w2 = math.log(1.0 - w1)
    inv_two_var = 0.5 / (sd * sd)

    def log_target(x: float) -> float:
        a = log_w1 - inv_two_var * (x - mu1) ** 2
        b = log_w2 - inv_two_var * (x - mu2) ** 2
        m = a if a > b else b
        return m + math.log(math.exp(a - m) + math.exp(b - m))

    return TargetModel(dim=1, log_target=log_target)


def ar1_gaussian_target(dim: int, rho: float = 0.5) -> TargetModel:
    """N(0, V) with V[i, j] = rho^|i-j|; log density via the tridiagonal precision."""
    if not (0.0 < rho < 1.0):
        raise ValueError("rho must lie in (0, 1)")
    c = 1.0 / (1.0 - rho * rho)

    def quad_form(x: np.ndarray) -> float:
        # x' P x with P the AR(1) precision, O(dim)
        if dim == 1:
            return float(x[0] * x[0])
        ss = float(np.dot(x, x)) + rho * rho * float(np.dot(x[1:-1], x[1:-1]))
        cross = float(np.dot(x[:-1], x[1:]))
        return c * (ss - 2.0 * rho * cross)

    def log_target(x) -> float:
        return -0.5 * quad_form(np.asarray(x, dtype=float))

    def grad_log_target(x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if dim == 1:
            return -x
        g = x.copy()
        g[1:-1] *= 1.0 + rho * rho
        g[:-1] -= rho * x[1:]
        g[1:] -= rho * x[:-1]
        return -c * g

    return TargetModel(dim=dim, log_target=log_target, grad_log_target=grad_log_target)


def ar1_exact_draw(dim: int, rho: float, s: RngStream) -> np.ndarray:
    """Exact draw from N(0, V), V[i, j] = rho^|i-j|, by the AR(1) recursion."""
    z = s.normal(size=dim)
    x = np.empty(dim)
    x[0] = z[0]
    scale = math.sqrt(1.0 - rho * rho)
    for i in range(1, dim):
        x[i] = rho * x[i - 1] + scale * z[i]
    return x


def gradient_matches_finite_differences(target: TargetModel, points, rel_tol: float = 1e-5,
                                        h: float = 1e-6) -> bool:
    """Check grad_log_target against central differences at the given points."""
    if target.grad_log_target is None:
        raise ValueError("target has no gradient")
    for pt in points:
        x = np.atleast_1d(np.asarray(pt, dtype=float))
        grad = np.atleast_1d(np.asarray(target.grad_log_target(pt if target.dim > 1 else float(x[0]))))
        for i in range(target.dim):
            xp, xm = x.copy(), x.copy()
            xp[i] += h
            xm[i] -= h
            if target.dim == 1:
                fd = (target.log_target(float(xp[0])) - target.log_target(float(xm[0]))) / (2 * h)
            else:
                fd = (target.log_target(xp) - target.log_target(xm)) / (2 * h)
            denom = max(1.0, abs(grad[i]))
            if abs(fd - grad[i]) / denom > rel_tol:
                return False
    return True
