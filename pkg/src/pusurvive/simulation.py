"""Synthetic data-generating process with known ground truth.

Pipeline per seed: draw covariates from a multivariate normal, link the
exponential rates, draw survival and censoring times, set the true event
indicator y = 1(t < c), randomly partition into D1/D2, label a random
fraction of D1's y=1 records with s=1, keep a random fraction of D2 as
s=0, concatenate, and strip fields according to the censoring mode.

RNG is numpy's default PCG64 generator seeded from the config, so datasets
are reproducible bit-exactly.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .model_core import Dataset, SubjectRecord

__all__ = ["DgpConfig", "GroundTruthRecord", "generate", "empirical_event_rate", "save_truth_csv"]


@dataclass(frozen=True)
class DgpConfig:
    theta_t_true: tuple[float, ...] = (2.0, 1.0)
    theta_c_true: tuple[float, ...] = (1.0, 0.5)
    x_mean: tuple[float, ...] = (0.7, 0.4)
    x_cov: tuple[tuple[float, ...], ...] = ((0.3, -0.1), (-0.1, 0.2))
    n_raw: int = 10000
    label_fraction_d1: float = 0.5
    keep_fraction_d2: float = 0.5
    split_fraction: float = 0.5
    c_observed_for_labeled: bool = True
    seed: int = 0

    def __post_init__(self):
        for name in ("label_fraction_d1", "keep_fraction_d2"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ValueError(f"{name} must be in (0, 1], got {v}")
        if not 0 <= self.split_fraction <= 1:
            raise ValueError(f"split_fraction must be in [0, 1], got {self.split_fraction}")
        cov = np.asarray(self.x_cov, dtype=float)
        if not np.allclose(cov, cov.T):
            raise ValueError("x_cov must be symmetric")

    @property
    def dimension(self) -> int:
        return len(self.x_mean)


@dataclass(frozen=True)
class GroundTruthRecord:
    """One raw subject before labeling; `label` is None if not in the final dataset."""

    t: float
    c: float
    x: tuple[float, ...]
    lambda_t: float
    lambda_c: float
    y_true: int
    label: Optional[int]


def generate(config: DgpConfig) -> tuple[Dataset, list[GroundTruthRecord], bool]:
    """Run the DGP; returns (dataset, per-raw-subject truth, empty_s1_warning).

    The warning flag is True when no record ended up labeled s=1 (events so
    rare that D1 contained none); the dataset is still returned.
    """
    rng = np.random.default_rng(config.seed)
    p = config.dimension
    theta_t = np.asarray(config.theta_t_true, dtype=float)
    theta_c = np.asarray(config.theta_c_true, dtype=float)
    mean = np.asarray(config.x_mean, dtype=float)
    cov = np.asarray(config.x_cov, dtype=float)
    chol = np.linalg.cholesky(cov)  # raises LinAlgError if not PD

    n = config.n_raw
    x = mean + rng.standard_normal((n, p)) @ chol.T
    lam_t = np.exp(x @ theta_t)
    lam_c = np.exp(x @ theta_c)
    # inverse-CDF exponential draws keep the stream portable
    t = -np.log1p(-rng.random(n)) / lam_t
    c = -np.log1p(-rng.random(n)) / lam_c
    y = (t < c).astype(int)

    perm = rng.permutation(n)
    n1 = int(round(config.split_fraction * n))
    d1, d2 = perm[:n1], perm[n1:]

    d1_events = d1[y[d1] == 1]
    k1 = int(round(config.label_fraction_d1 * d1_events.size))
    s1_idx = rng.choice(d1_events, size=k1, replace=False) if k1 else np.array([], dtype=int)
    k2 = int(round(config.keep_fraction_d2 * d2.size))
    s0_idx = rng.choice(d2, size=k2, replace=False) if k2 else np.array([], dtype=int)

    label = np.full(n, -1)  # -1 = dropped
    label[np.sort(s1_idx)] = 1
    label[np.sort(s0_idx)] = 0

    records = []
    for i in np.concatenate([np.sort(s1_idx), np.sort(s0_idx)]):
        if label[i] == 1:
            ci = float(c[i]) if config.c_observed_for_labeled else None
            records.append(SubjectRecord(float(t[i]), ci, 1, tuple(x[i]), int(y[i])))
        else:
            records.append(SubjectRecord(None, float(c[i]), 0, tuple(x[i]), int(y[i])))

    truth = [
        GroundTruthRecord(
            t=float(t[i]),
            c=float(c[i]),
            x=tuple(x[i]),
            lambda_t=float(lam_t[i]),
            lambda_c=float(lam_c[i]),
            y_true=int(y[i]),
            label=None if label[i] < 0 else int(label[i]),
        )
        for i in range(n)
    ]
    dataset = Dataset(tuple(records), p, config.c_observed_for_labeled)
    return dataset, truth, len(s1_idx) == 0


def empirical_event_rate(truth: Sequence[GroundTruthRecord]) -> float:
    """Fraction of ground-truth records with y = 1."""
    if not truth:
        raise ValueError("truth list is empty")
    return sum(r.y_true for r in truth) / len(truth)


def save_truth_csv(truth: Sequence[GroundTruthRecord], path, selected_only: bool = True) -> None:
    """Sidecar with the generated-dataset columns (t, c, x, rates, y, s)."""
    rows = [r for r in truth if r.label is not None] if selected_only else list(truth)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        p = len(rows[0].x) if rows else 0
        w.writerow(
            ["t", "c"] + [f"x{j + 1}" for j in range(p)] + ["lambda_t", "lambda_c", "y", "s"]
        )
        for r in rows:
            w.writerow(
                [repr(r.t), repr(r.c)]
                + [repr(v) for v in r.x]
                + [repr(r.lambda_t), repr(r.lambda_c), r.y_true, "" if r.label is None else r.label]
            )
