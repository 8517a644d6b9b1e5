"""Closed-form objectives for exponential survival and censoring regression.

Four model variants are supported ({PUSA, Conventional} x {c observed,
c unobserved}); for each, `neg_loglik`, `grad` and `neg_hessian` give the
negative log-likelihood of one parameter block (theta_t or theta_c, the
other held fixed), its gradient, and the observed information matrix
Q = -grad grad' log L.

Rates: lambda_t = exp(x' theta_t), lambda_c = exp(x' theta_c). Constants
dropped by the proportionality in the likelihoods are dropped here too, so
values match the printed formulas.

The conventional variants are the misspecified baseline that treats the
selection label s as if it were the censoring indicator y.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .model_core import (
    CensoringMode,
    Dataset,
    Estimator,
    ModelVariant,
    as_param_vector,
)

__all__ = [
    "ObjectiveTarget",
    "LikelihoodContext",
    "neg_loglik",
    "grad",
    "neg_hessian",
]


class ObjectiveTarget(enum.Enum):
    THETA_T = "theta_t"
    THETA_C = "theta_c"


@dataclass(frozen=True)
class LikelihoodContext:
    """Dataset, variant, and the current parameter pair."""

    dataset: Dataset
    variant: ModelVariant
    theta_t: np.ndarray
    theta_c: np.ndarray

    def __post_init__(self):
        p = self.dataset.dimension
        object.__setattr__(self, "theta_t", as_param_vector(self.theta_t, p))
        object.__setattr__(self, "theta_c", as_param_vector(self.theta_c, p))


def _fsum(a: np.ndarray) -> float:
    # compensated accumulation; per-record terms span orders of magnitude
    return math.fsum(a.tolist())


def _prepare(ctx: LikelihoodContext, target: ObjectiveTarget):
    """Common per-record quantities, with variant-specific field checks."""
    x, s, t, c = ctx.dataset.arrays()
    lt = np.exp(x @ ctx.theta_t)
    lc = np.exp(x @ ctx.theta_c)

    mode = ctx.variant.censoring_mode
    need_t = s == 1
    if target is ObjectiveTarget.THETA_C and mode is CensoringMode.C_OBSERVED:
        # both estimators use the lambda_c * c term for every record here
        need_c = np.ones_like(s, dtype=bool)
    else:
        need_c = s == 0
    missing_t = np.flatnonzero(need_t & np.isnan(t))
    missing_c = np.flatnonzero(need_c & np.isnan(c))
    if missing_t.size:
        raise ValueError(f"record {missing_t[0]}: survival time required for {ctx.variant}")
    if missing_c.size:
        raise ValueError(f"record {missing_c[0]}: censoring time required for {ctx.variant}")
    return x, s, t, c, lt, lc


def _per_record_loglik(ctx: LikelihoodContext, target: ObjectiveTarget) -> np.ndarray:
    x, s, t, c, lt, lc = _prepare(ctx, target)
    log_sum = np.log(lt + lc)
    t0 = np.where(np.isnan(t), 0.0, t)
    c0 = np.where(np.isnan(c), 0.0, c)
    est, mode = ctx.variant.estimator, ctx.variant.censoring_mode

    if est is Estimator.PUSA:
        if target is ObjectiveTarget.THETA_T:
            # identical in both censoring modes
            return s * (log_sum - lt * t0)
        if mode is CensoringMode.C_OBSERVED:
            return s * log_sum + x @ ctx.theta_c - lc * c
        return s * (log_sum - lc * t0) + (1 - s) * (x @ ctx.theta_c - lc * c0)

    # conventional baseline
    if target is ObjectiveTarget.THETA_T:
        # identical in both censoring modes
        return -s * lt * t0 - (1 - s) * lt * c0 + log_sum
    if mode is CensoringMode.C_OBSERVED:
        return s * (x @ ctx.theta_c) - lc * c + log_sum
    return -s * lc * t0 - (1 - s) * lc * c0 + log_sum


def neg_loglik(ctx: LikelihoodContext, target: ObjectiveTarget) -> float:
    """-log L for the target parameter block, up to the dropped constants."""
    terms = _per_record_loglik(ctx, target)
    bad = np.flatnonzero(~np.isfinite(terms))
    if bad.size:
        raise FloatingPointError(f"non-finite likelihood term at record {bad[0]}")
    return -_fsum(terms)


def _per_record_score(ctx: LikelihoodContext, target: ObjectiveTarget):
    """Scalar factor m_i so that grad(log L) = sum_i m_i * x_i."""
    x, s, t, c, lt, lc = _prepare(ctx, target)
    A = lt / (lt + lc)
    B = lc / (lt + lc)
    t0 = np.where(np.isnan(t), 0.0, t)
    c0 = np.where(np.isnan(c), 0.0, c)
    est, mode = ctx.variant.estimator, ctx.variant.censoring_mode

    if est is Estimator.PUSA:
        if target is ObjectiveTarget.THETA_T:
            return x, s * (A - lt * t0)
        if mode is CensoringMode.C_OBSERVED:
            return x, s * B + 1.0 - lc * c
        return x, s * (B - lc * t0) + (1 - s) * (1.0 - lc * c0)

    if target is ObjectiveTarget.THETA_T:
        return x, -s * lt * t0 - (1 - s) * lt * c0 + A
    if mode is CensoringMode.C_OBSERVED:
        # printed derivative has a lambda_c/(lambda_c+lambda_c) typo;
        # this is the derivative of the printed log-likelihood
        return x, s - lc * c + B
    return x, -s * lc * t0 - (1 - s) * lc * c0 + B


def grad(ctx: LikelihoodContext, target: ObjectiveTarget) -> np.ndarray:
    """Gradient of `neg_loglik` (i.e. minus the score of log L)."""
    x, m = _per_record_score(ctx, target)
    if not np.all(np.isfinite(m)):
        raise FloatingPointError(
            f"non-finite score term at record {np.flatnonzero(~np.isfinite(m))[0]}"
        )
    cols = x * m[:, None]
    return np.array([-_fsum(cols[:, j]) for j in range(x.shape[1])])


def _per_record_curvature(ctx: LikelihoodContext, target: ObjectiveTarget):
    """Scalar factor q_i so that Q = -sum_i q_i * x_i x_i'."""
    x, s, t, c, lt, lc = _prepare(ctx, target)
    A = lt / (lt + lc)
    B = lc / (lt + lc)
    t0 = np.where(np.isnan(t), 0.0, t)
    c0 = np.where(np.isnan(c), 0.0, c)
    est, mode = ctx.variant.estimator, ctx.variant.censoring_mode

    if est is Estimator.PUSA:
        if target is ObjectiveTarget.THETA_T:
            return x, s * (A * (1 - A) - lt * t0)
        if mode is CensoringMode.C_OBSERVED:
            return x, s * B * (1 - B) - lc * c
        return x, s * (B * (1 - B) - lc * t0) - (1 - s) * lc * c0
    if target is ObjectiveTarget.THETA_T:
        return x, -s * lt * t0 - (1 - s) * lt * c0 + A * (1 - A)
    if mode is CensoringMode.C_OBSERVED:
        return x, B * (1 - B) - lc * c
    return x, -s * lc * t0 - (1 - s) * lc * c0 + B * (1 - B)


def neg_hessian(ctx: LikelihoodContext, target: ObjectiveTarget) -> np.ndarray:
    """Observed information Q = -hess(log L) = hess(neg_loglik); symmetric."""
    x, q = _per_record_curvature(ctx, target)
    if not np.all(np.isfinite(q)):
        raise FloatingPointError(
            f"non-finite curvature term at record {np.flatnonzero(~np.isfinite(q))[0]}"
        )
    p = x.shape[1]
    out = np.empty((p, p))
    for j in range(p):
        for k in range(j, p):
            out[j, k] = out[k, j] = -_fsum(q * x[:, j] * x[:, k])
    return out
