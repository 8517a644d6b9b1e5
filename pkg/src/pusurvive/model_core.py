"""Domain types, dataset container, validation, and CSV/JSON round-trip.

A subject contributes an observation tuple (t, c, s, x):

* ``t`` -- survival time, present only for labeled records (s=1),
* ``c`` -- censoring time, present for unlabeled records and, in
  "c observed" mode, also for labeled ones,
* ``s`` -- selection label; s=1 means the event is known to have
  occurred (t < c), s=0 means the record is unlabeled,
* ``x`` -- covariate vector of length p.

Rates are linked to covariates log-linearly: lambda = exp(x' theta).
"""

from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "SubjectRecord",
    "Dataset",
    "Estimator",
    "CensoringMode",
    "ModelVariant",
    "validate_dataset",
    "link_rate",
    "as_param_vector",
    "load_csv",
    "save_csv",
    "load_json",
    "save_json",
]


class Estimator(enum.Enum):
    PUSA = "pusa"
    CONVENTIONAL = "conventional"


class CensoringMode(enum.Enum):
    C_OBSERVED = "observed"
    C_UNOBSERVED = "unobserved"


@dataclass(frozen=True)
class ModelVariant:
    """One of the four likelihood variants: {PUSA, Conventional} x censoring mode."""

    estimator: Estimator
    censoring_mode: CensoringMode

    def __str__(self) -> str:
        return f"{self.estimator.value}_c_{self.censoring_mode.value}"

    @staticmethod
    def parse(name: str) -> "ModelVariant":
        est, _, mode = name.partition("_c_")
        return ModelVariant(Estimator(est), CensoringMode(mode))


PUSA_C_OBSERVED = ModelVariant(Estimator.PUSA, CensoringMode.C_OBSERVED)
PUSA_C_UNOBSERVED = ModelVariant(Estimator.PUSA, CensoringMode.C_UNOBSERVED)
CONVENTIONAL_C_OBSERVED = ModelVariant(Estimator.CONVENTIONAL, CensoringMode.C_OBSERVED)
CONVENTIONAL_C_UNOBSERVED = ModelVariant(Estimator.CONVENTIONAL, CensoringMode.C_UNOBSERVED)

ALL_VARIANTS = (
    PUSA_C_OBSERVED,
    PUSA_C_UNOBSERVED,
    CONVENTIONAL_C_OBSERVED,
    CONVENTIONAL_C_UNOBSERVED,
)


@dataclass(frozen=True)
class SubjectRecord:
    """One subject's observation. Absent times are ``None``, never sentinels."""

    survival_time: Optional[float]
    censoring_time: Optional[float]
    label: int
    covariates: tuple[float, ...]
    true_event_indicator: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "covariates", tuple(float(v) for v in self.covariates))


@dataclass(frozen=True)
class Dataset:
    """Immutable in-memory PU dataset.

    ``c_observed_for_labeled`` distinguishes the two data shapes: when True,
    labeled records carry the censoring time as well.
    """

    records: tuple[SubjectRecord, ...]
    dimension: int
    c_observed_for_labeled: bool
    _arrays: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))

    def __len__(self) -> int:
        return len(self.records)

    def n_labeled(self) -> int:
        return sum(r.label for r in self.records)

    def arrays(self):
        """Columnar view (x, s, t, c) with NaN for absent times; cached."""
        if not self._arrays:
            n = len(self.records)
            x = np.empty((n, self.dimension))
            s = np.empty(n)
            t = np.full(n, np.nan)
            c = np.full(n, np.nan)
            for i, r in enumerate(self.records):
                x[i] = r.covariates
                s[i] = r.label
                if r.survival_time is not None:
                    t[i] = r.survival_time
                if r.censoring_time is not None:
                    c[i] = r.censoring_time
            self._arrays.update(x=x, s=s, t=t, c=c)
        a = self._arrays
        return a["x"], a["s"], a["t"], a["c"]

    def to_c_unobserved(self) -> "Dataset":
        """Drop censoring times from labeled records (Table-2 shape)."""
        recs = []
        for r in self.records:
            if r.label == 1 and r.censoring_time is not None:
                recs.append(
                    SubjectRecord(r.survival_time, None, 1, r.covariates, r.true_event_indicator)
                )
            else:
                recs.append(r)
        return Dataset(tuple(recs), self.dimension, c_observed_for_labeled=False)


def validate_dataset(d: Dataset) -> list[str]:
    """Return a list of invariant violations; empty means the dataset is valid.

    Violations are data, not exceptions: each entry names the record index
    and the rule it breaks.
    """
    out: list[str] = []
    for i, r in enumerate(d.records):
        if r.label not in (0, 1):
            out.append(f"record {i}: label must be 0 or 1, got {r.label}")
            continue
        if len(r.covariates) != d.dimension:
            out.append(
                f"record {i}: covariate length {len(r.covariates)} != dimension {d.dimension}"
            )
        for name, v in (("t", r.survival_time), ("c", r.censoring_time)):
            if v is not None and (not math.isfinite(v) or v <= 0):
                out.append(f"record {i}: {name} must be finite and > 0, got {v}")
        if r.label == 1:
            if r.survival_time is None:
                out.append(f"record {i}: s=1 requires t present")
            if d.c_observed_for_labeled:
                if r.censoring_time is None:
                    out.append(f"record {i}: s=1 requires c present in c-observed mode")
                elif r.survival_time is not None and not r.survival_time < r.censoring_time:
                    out.append(f"record {i}: t<c required under s=1")
        else:
            if r.censoring_time is None:
                out.append(f"record {i}: s=0 requires c present")
            if r.survival_time is not None:
                out.append(f"record {i}: s=0 requires t absent")
    if not any(r.label == 1 for r in d.records):
        out.append("dataset: no s=1 records; theta_t is unidentifiable")
    return out


def as_param_vector(values: Sequence[float], dimension: Optional[int] = None) -> np.ndarray:
    """Coerce to a finite 1-D float vector, optionally checking its length."""
    theta = np.asarray(values, dtype=float)
    if theta.ndim != 1:
        raise ValueError(f"parameter vector must be 1-D, got shape {theta.shape}")
    if not np.all(np.isfinite(theta)):
        raise ValueError("parameter vector entries must be finite")
    if dimension is not None and theta.shape[0] != dimension:
        raise ValueError(f"parameter length {theta.shape[0]} != dimension {dimension}")
    return theta


def link_rate(x: Sequence[float], theta: Sequence[float]) -> float:
    """Log-linear rate link: exp(x' theta)."""
    xv = np.asarray(x, dtype=float)
    tv = np.asarray(theta, dtype=float)
    if xv.shape != tv.shape:
        raise ValueError(f"dimension mismatch: x has shape {xv.shape}, theta {tv.shape}")
    return float(np.exp(xv @ tv))


# ---------------------------------------------------------------------------
# CSV / JSON serialization. Header is t,c,s,x1,...,xp; empty field = absent.
# Floats are written with repr so the round trip is bit-exact.
# ---------------------------------------------------------------------------

def _fmt(v: Optional[float]) -> str:
    return "" if v is None else repr(float(v))


def save_csv(d: Dataset, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "c", "s"] + [f"x{j + 1}" for j in range(d.dimension)])
        for r in d.records:
            w.writerow([_fmt(r.survival_time), _fmt(r.censoring_time), r.label]
                       + [repr(v) for v in r.covariates])


def load_csv(path, c_observed_for_labeled: bool = True) -> Dataset:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    if header[:3] != ["t", "c", "s"]:
        raise ValueError(f"unexpected CSV header {header[:3]}, want ['t', 'c', 's']")
    p = len(header) - 3
    recs = []
    for row in rows[1:]:
        t = float(row[0]) if row[0] != "" else None
        c = float(row[1]) if row[1] != "" else None
        s = int(row[2])
        x = tuple(float(v) for v in row[3:])
        recs.append(SubjectRecord(t, c, s, x))
    return Dataset(tuple(recs), p, c_observed_for_labeled)


def save_json(d: Dataset, path) -> None:
    objs = []
    for r in d.records:
        o: dict = {"s": r.label, "x": list(r.covariates)}
        if r.survival_time is not None:
            o["t"] = r.survival_time
        if r.censoring_time is not None:
            o["c"] = r.censoring_time
        objs.append(o)
    doc = {"dimension": d.dimension,
           "c_observed_for_labeled": d.c_observed_for_labeled,
           "records": objs}
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_json(path) -> Dataset:
    with open(path) as fh:
        doc = json.load(fh)
    recs = [
        SubjectRecord(o.get("t"), o.get("c"), int(o["s"]), tuple(o["x"]))
        for o in doc["records"]
    ]
    return Dataset(tuple(recs), int(doc["dimension"]), bool(doc["c_observed_for_labeled"]))
