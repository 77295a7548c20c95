"""Bundled datasets with pinned checksums.

``pump.csv``: operating times (thousands of hours) and failure counts for
the ten pumps of the Farley-1 nuclear power station (Gaver & O'Hagan 1987).

``hpv.csv`` / ``cancer.csv``: the thirteen-country HPV prevalence and
cervical cancer incidence data of Maucort-Boulch et al. (2008) as used by
Plummer (2014): women testing positive for high-risk HPV out of the women
surveyed, and cancer case counts with follow-up exposure.  ``cancer.csv``
stores the exposure as ``log_pyears`` (log woman-years) because it enters
the Poisson regression as an additive log offset.

Loading from the packaged copies verifies a pinned SHA-256; loading a
user-supplied path skips verification.
"""
from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

__all__ = ["PumpData", "HpvData", "CancerData", "load_pump_data", "load_hpv_data",
           "load_cancer_data", "DATA_CHECKSUMS", "data_checksums"]

DATA_CHECKSUMS = {
    "pump.csv": "6e391e0d9addd07c2fca999ed713ec93f19b0c540faca8c77fd551b737a673ac",
    "hpv.csv": "55389f51df12bfedd43b800ad604cae539c5c2f6451a87a66687d6f7cc86487f",
    "cancer.csv": "66cf2a9aeae0e8555f6e4ed81249cec862e947b7f49b3096a333125f62162d2e",
}


@dataclass(frozen=True)
class PumpData:
    t: np.ndarray  # operating times
    s: np.ndarray  # failure counts

    def __post_init__(self):
        if len(self.t) != 10 or len(self.s) != 10:
            raise ValueError("pump data has exactly ten pumps")
        if np.any(self.t <= 0) or np.any(self.s < 0):
            raise ValueError("operating times must be positive, counts nonnegative")


@dataclass(frozen=True)
class HpvData:
    ncases: np.ndarray  # women testing positive for high-risk HPV
    npop: np.ndarray  # women surveyed


@dataclass(frozen=True)
class CancerData:
    ncases: np.ndarray  # cancer case counts
    log_pyears: np.ndarray  # log woman-years of follow-up


def _packaged(name: str) -> Path:
    return resources.files("coupled_mcmc").joinpath("data", name)


def _read_csv(path, name: str, verify: bool):
    if path is None:
        path = _packaged(name)
        verify = True
    raw = Path(path).read_bytes()
    if verify:
        digest = hashlib.sha256(raw).hexdigest()
        if digest != DATA_CHECKSUMS[name]:
            raise ValueError(f"{name} checksum mismatch: {digest}")
    rows = list(csv.DictReader(raw.decode("utf-8").splitlines()))
    if not rows:
        raise ValueError(f"{name} is empty")
    return rows


def _column(rows, key: str, name: str, cast=float) -> np.ndarray:
    out = []
    for i, row in enumerate(rows):
        if key not in row or row[key] in (None, ""):
            raise ValueError(f"{name}: row {i + 1} is missing column {key!r}")
        try:
            out.append(cast(row[key]))
        except ValueError as e:
            raise ValueError(f"{name}: row {i + 1} has bad {key!r}: {row[key]!r}") from e
    return np.asarray(out)


def load_pump_data(path=None) -> PumpData:
    rows = _read_csv(path, "pump.csv", verify=False)
    return PumpData(t=_column(rows, "t", "pump.csv"),
                    s=_column(rows, "s", "pump.csv", cast=lambda v: int(float(v))))


def load_hpv_data(path=None) -> HpvData:
    rows = _read_csv(path, "hpv.csv", verify=False)
    return HpvData(ncases=_column(rows, "ncases", "hpv.csv", cast=int),
                   npop=_column(rows, "npop", "hpv.csv", cast=int))


def load_cancer_data(path=None, raw_pyears: bool = False) -> CancerData:
    """Cancer incidence data; set ``raw_pyears`` to read a ``pyears`` column
    of raw woman-years and apply the log transform here."""
    rows = _read_csv(path, "cancer.csv", verify=False)
    ncases = _column(rows, "ncases", "cancer.csv", cast=int)
    if raw_pyears:
        pyears = _column(rows, "pyears", "cancer.csv")
        if np.any(pyears <= 0):
            raise ValueError("woman-years must be positive")
        return CancerData(ncases=ncases, log_pyears=np.log(pyears))
    return CancerData(ncases=ncases, log_pyears=_column(rows, "log_pyears", "cancer.csv"))


def data_checksums() -> dict:
    """SHA-256 of the packaged data files (recomputed, for manifests)."""
    out = {}
    for name in DATA_CHECKSUMS:
        out[name] = hashlib.sha256(Path(_packaged(name)).read_bytes()).hexdigest()
    return out
