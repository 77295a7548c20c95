"""Bimodal-mixture experiment: tail-mass estimation on 0.5 N(-4,1) + 0.5 N(4,1).

Three regimes of (proposal scale, initial distribution) show the method at
its best and at its worst: wide proposals with an overdispersed start meet
fast and estimate well; narrow proposals started near one mode can meet
quickly for the wrong reason and produce confidently wrong intervals at
small replication counts.  One set of coupled runs per regime supports the
meeting-time summary, the tail-mass estimate, the burn-in/horizon grid of
cost x variance, and the histogram, since estimators for every (k, m) pair
are functions of the same stored trajectories.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..diagnostics import MeetingTimeSample
from ..estimators import aggregate, h_km_from_values, run_coupled
from ..kernels import RandomWalkMetropolis
from ..measures import HistogramResult, histogram, signed_measure
from ..rng import StreamFactory
from ..targets import bimodal_mixture_target
from .common import (
    any_float,
    int_list,
    map_replicates,
    nonneg_int,
    positive_float,
    positive_int,
    probability,
    validate_config,
    write_csv,
    write_manifest,
)

__all__ = ["REGIMES", "CONFIG_SCHEMA", "MixtureResult", "run_mixture", "write_outputs",
           "mixture_kernel_and_init", "batch_means_asymptotic_variance"]

# (proposal sd, initial mean, initial sd, default k, default m)
REGIMES = {
    "easy": (3.0, 10.0, 10.0, 200, 4000),
    "intermediate": (1.0, 10.0, 10.0, 20000, 30000),
    "hard-init": (1.0, 10.0, 1.0, 50, 500),
}

CONFIG_SCHEMA = {
    "regime": ("easy", lambda v: _check_regime(v)),
    "proposal_sd": (None, lambda v: None if v is None else positive_float(v)),
    "pi0_mean": (None, lambda v: None if v is None else any_float(v)),
    "pi0_sd": (None, lambda v: None if v is None else positive_float(v)),
    "k": (None, lambda v: None if v is None else nonneg_int(v)),
    "m": (None, lambda v: None if v is None else positive_int(v)),
    "R": (1000, positive_int),
    "threshold": (3.0, any_float),
    "table_k": ([1, 100, 200], int_list),
    "table_multipliers": ([1, 10, 20], int_list),
    "histogram_lo": (-8.0, any_float),
    "histogram_hi": (8.0, any_float),
    "histogram_bins": (64, positive_int),
    "vinf_iterations": (1_000_000, positive_int),
    "vinf_burnin": (10_000, positive_int),
    "confidence_z": (1.96, positive_float),
}


def _check_regime(v):
    if v not in REGIMES:
        raise ValueError(f"regime must be one of {sorted(REGIMES)}")
    return v


def resolve_config(config: dict) -> dict:
    cfg = validate_config(config, CONFIG_SCHEMA, "mixture")
    sd, mean, isd, k, m = REGIMES[cfg["regime"]]
    cfg["proposal_sd"] = cfg["proposal_sd"] if cfg["proposal_sd"] is not None else sd
    cfg["pi0_mean"] = cfg["pi0_mean"] if cfg["pi0_mean"] is not None else mean
    cfg["pi0_sd"] = cfg["pi0_sd"] if cfg["pi0_sd"] is not None else isd
    cfg["k"] = cfg["k"] if cfg["k"] is not None else k
    cfg["m"] = cfg["m"] if cfg["m"] is not None else m
    if cfg["m"] < cfg["k"]:
        raise ValueError("m must be >= k")
    return cfg


def mixture_kernel_and_init(proposal_sd: float, pi0_mean: float, pi0_sd: float):
    kernel = RandomWalkMetropolis(bimodal_mixture_target(), proposal_sd**2)

    def init(stream) -> float:
        return pi0_mean + pi0_sd * float(stream.normal())

    return kernel, init


@dataclass
class TableRow:
    k: int
    m: int
    mean_cost: float
    variance: float
    inefficiency: float
    inefficiency_over_vinf: float
    estimate: float


@dataclass
class MixtureResult:
    config: dict
    taus: np.ndarray
    report: "object"  # EstimateReport for the tail mass at (k, m)
    table: list
    hist: HistogramResult
    vinf: float

    @property
    def meeting_sample(self) -> MeetingTimeSample:
        return MeetingTimeSample(self.taus, R=len(self.taus), label="mixture")


def batch_means_asymptotic_variance(values: np.ndarray) -> float:
    """Batch-means estimate of the MCMC asymptotic variance of the mean."""
    n = len(values)
    b = int(np.floor(np.sqrt(n)))
    nb = n // b
    trimmed = values[: nb * b]
    means = trimmed.reshape(nb, b).mean(axis=1)
    return b * float(means.var(ddof=1))


def run_mixture(config: dict, factory: StreamFactory, threads: int = 1) -> MixtureResult:
    cfg = resolve_config(config)
    kernel, init = mixture_kernel_and_init(cfg["proposal_sd"], cfg["pi0_mean"], cfg["pi0_sd"])
    threshold = cfg["threshold"]
    h = lambda x: 1.0 if x > threshold else 0.0

    cells = [(k, mult * k) for k in cfg["table_k"] for mult in cfg["table_multipliers"]]
    m_run = max([cfg["m"], *(m for _, m in cells)])
    breaks = np.linspace(cfg["histogram_lo"], cfg["histogram_hi"], cfg["histogram_bins"] + 1)

    def worker(r: int):
        stream = factory.stream(r, "mixture")
        run = run_coupled(kernel, init, k=0, m=m_run, s=stream, max_iter=10**7)
        hx = np.asarray(run.x_states)
        hx = (hx > threshold).astype(float)
        hy = (np.asarray(run.y_states) > threshold).astype(float)
        estimate = h_km_from_values(hx, hy, run.tau, cfg["k"], cfg["m"])
        cell_values = [h_km_from_values(hx, hy, run.tau, k, m) for k, m in cells]
        mu = signed_measure(run, cfg["k"], cfg["m"])
        hist_row, _ = np.histogram(mu.atoms, bins=breaks, weights=mu.weights)
        return run.tau, estimate, cell_values, hist_row

    results = map_replicates(worker, cfg["R"], threads)
    taus = np.asarray([r[0] for r in results])
    estimates = np.asarray([r[1] for r in results])
    cell_matrix = np.asarray([r[2] for r in results])
    hist_rows = np.asarray([r[3] for r in results])

    main_costs = _cell_costs(taus, cfg["m"])
    report = aggregate(estimates, main_costs, z=cfg["confidence_z"])

    vinf = _vinf(kernel, cfg, factory, h)
    table = []
    for j, (k, m) in enumerate(cells):
        costs = _cell_costs(taus, m)
        variance = float(cell_matrix[:, j].var(ddof=1))
        mean_cost = float(costs.mean())
        ineff = mean_cost * variance
        table.append(TableRow(k=k, m=m, mean_cost=mean_cost, variance=variance,
                              inefficiency=ineff, inefficiency_over_vinf=ineff / vinf,
                              estimate=float(cell_matrix[:, j].mean())))

    z = cfg["confidence_z"]
    R = cfg["R"]
    est = hist_rows.mean(axis=0)
    half = z * np.sqrt(hist_rows.var(axis=0, ddof=1) / R)
    hist = HistogramResult(breaks=breaks, estimate=est, ci_low=est - half,
                           ci_high=est + half, per_replicate=hist_rows)
    return MixtureResult(config=cfg, taus=taus, report=report, table=table,
                         hist=hist, vinf=vinf)


def _cell_costs(taus: np.ndarray, m: int) -> np.ndarray:
    # documented convention: 2 (tau - 1) coupled-call units + 1 + max(0, m - tau)
    return 2.0 * (taus - 1) + 1.0 + np.maximum(0, m - taus)


def _vinf(kernel, cfg, factory: StreamFactory, h) -> float:
    stream = factory.stream(0, "mixture-vinf")
    x = cfg["pi0_mean"] + cfg["pi0_sd"] * float(stream.normal())
    burn, iters = cfg["vinf_burnin"], cfg["vinf_iterations"]
    values = np.empty(iters)
    for i in range(burn):
        x = kernel.single_step(x, stream)
    for i in range(iters):
        x = kernel.single_step(x, stream)
        values[i] = h(x)
    return batch_means_asymptotic_variance(values)


def write_outputs(result: MixtureResult, out_dir, seed: int):
    cfg = result.config
    write_manifest(out_dir, "mixture", seed, cfg, extra={"vinf": result.vinf})
    write_csv(f"{out_dir}/meetingtimes.csv", ["replicate_id", "tau"],
              list(enumerate(result.taus)))
    rep = result.report
    write_csv(
        f"{out_dir}/estimates.csv",
        ["k", "m", "estimate", "ci_low", "ci_high", "variance", "mean_cost", "inefficiency"],
        [[cfg["k"], cfg["m"], rep.mean[()], rep.ci_low[()], rep.ci_high[()],
          rep.sample_variance[()], rep.mean_cost, rep.inefficiency[()]]],
    )
    write_csv(
        f"{out_dir}/table.csv",
        ["k", "m", "mean_cost", "variance", "inefficiency", "inefficiency_over_vinf"],
        [[row.k, row.m, row.mean_cost, row.variance, row.inefficiency,
          row.inefficiency_over_vinf] for row in result.table],
    )
    hist = result.hist
    write_csv(
        f"{out_dir}/histogram.csv",
        ["bin_low", "bin_high", "estimate", "ci_low", "ci_high"],
        [[hist.breaks[i], hist.breaks[i + 1], hist.estimate[i], hist.ci_low[i],
          hist.ci_high[i]] for i in range(len(hist.estimate))],
    )
