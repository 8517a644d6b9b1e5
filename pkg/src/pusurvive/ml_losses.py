"""PU-weighted loss functions: Cox partial likelihood and discrete logit hazard.

Both losses use only the labeled (s=1) records and weight each subject by
the inverse of its event probability P(y=1|x); the censoring distribution
is treated as known. Fitting alternates weight recomputation with frozen-
weight minimization until the parameter update stalls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .distributions import EXPONENTIAL, DistributionSpec, event_probability
from .estimator import minimize
from .model_core import Dataset, as_param_vector

__all__ = [
    "RiskFunction",
    "DiscreteHazardParams",
    "KnownCensoringModel",
    "LossFitResult",
    "risk_set",
    "pu_cox_loss",
    "discrete_hazard",
    "discrete_event_probability",
    "pu_logit_loss",
    "fit_loss",
]


@dataclass(frozen=True)
class RiskFunction:
    """Linear risk score g(x) = params' x. The seam is open for other kinds."""

    params: tuple[float, ...]
    kind: str = "linear"

    def __post_init__(self):
        if self.kind != "linear":
            raise NotImplementedError(f"risk function kind {self.kind!r} not supported")

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x) @ np.asarray(self.params)


@dataclass(frozen=True)
class DiscreteHazardParams:
    """Per-period intercepts alpha_1..alpha_J plus regression coefficients."""

    alpha: tuple[float, ...]
    beta: tuple[float, ...]

    @property
    def n_periods(self) -> int:
        return len(self.alpha)


@dataclass(frozen=True)
class KnownCensoringModel:
    """Fixed censoring distribution; rate linked as lambda_c = exp(x' theta_c)."""

    theta_c: tuple[float, ...]
    spec: DistributionSpec = EXPONENTIAL

    def rates(self, x: np.ndarray) -> np.ndarray:
        return np.exp(np.asarray(x) @ np.asarray(self.theta_c))


@dataclass
class LossFitResult:
    params: object  # RiskFunction or DiscreteHazardParams
    converged: bool
    outer_iterations: int


def risk_set(times, i: int) -> set[int]:
    """Indices j with observed time t_j >= t_i (>= keeps ties on both sides)."""
    times = np.asarray(times, dtype=float)
    if not np.all(np.isfinite(times)):
        raise ValueError("times must be finite")
    return set(np.flatnonzero(times >= times[i]).tolist())


def _labeled_arrays(data: Dataset):
    x, s, t, _ = data.arrays()
    idx = np.flatnonzero(s == 1)
    if idx.size == 0:
        raise ValueError("no labeled events")
    return x[idx], t[idx]


def _event_weights(x1: np.ndarray, theta_t: np.ndarray, cm: KnownCensoringModel) -> np.ndarray:
    """1 / P(y=1|x) per labeled record, with the current survival rates."""
    lam_t = np.exp(x1 @ theta_t)
    lam_c = cm.rates(x1)
    probs = np.array(
        [event_probability(EXPONENTIAL, cm.spec, lt, lc) for lt, lc in zip(lam_t, lam_c)]
    )
    if np.any(probs <= 0):
        raise ValueError(
            f"zero event probability at labeled record {int(np.argmin(probs))}"
        )
    return 1.0 / probs


def _cox_terms(x1: np.ndarray, t1: np.ndarray, theta: np.ndarray):
    """Per-record log-sum-exp over risk sets and its score, Breslow ties.

    Returns (terms, score_rows) with terms_i = log sum_{j in R_i}
    exp(g_j - g_i) and score_rows_i = xbar_i - x_i (risk-set weighted mean
    minus own covariates).
    """
    g = x1 @ theta
    m = g.max()
    e = np.exp(g - m)
    order = np.argsort(-t1, kind="stable")
    ts = t1[order]
    cum_e = np.cumsum(e[order])
    cum_xe = np.cumsum((x1 * e[:, None])[order], axis=0)
    # last position of each tie group in the descending sort
    last = np.searchsorted(-ts, -ts, side="right") - 1
    S = cum_e[last]
    num = cum_xe[last]
    terms_sorted = np.log(S) - (g[order] - m)
    score_sorted = num / S[:, None] - x1[order]
    terms = np.empty_like(terms_sorted)
    score = np.empty_like(score_sorted)
    terms[order] = terms_sorted
    score[order] = score_sorted
    return terms, score


def pu_cox_loss(data: Dataset, g: RiskFunction, cm: KnownCensoringModel) -> float:
    """Weighted mean over s=1 records of log sum_{R_i} exp(g_j - g_i) / P(y=1|x_i)."""
    x1, t1 = _labeled_arrays(data)
    theta = as_param_vector(g.params, x1.shape[1])
    w = _event_weights(x1, theta, cm)
    terms, _ = _cox_terms(x1, t1, theta)
    return float(np.mean(w * terms))


def discrete_hazard(tau: int, x, hp: DiscreteHazardParams) -> float:
    """Logistic hazard at period tau: sigmoid(alpha_tau + beta' x)."""
    if not 1 <= tau <= hp.n_periods:
        raise ValueError(f"period {tau} outside 1..{hp.n_periods}")
    z = hp.alpha[tau - 1] + float(np.asarray(x) @ np.asarray(hp.beta))
    # stable logistic
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


def _geometric_cdf(lam_c: float, tau: np.ndarray) -> np.ndarray:
    """Discrete censoring CDF: geometric analogue of the exponential rate."""
    q = -np.expm1(-lam_c)  # per-period censoring probability
    return 1.0 - (1.0 - q) ** tau


def discrete_event_probability(
    x, hp: DiscreteHazardParams, cm: KnownCensoringModel, tail: float = 1e-12
) -> float:
    """P(y=1|x) = 1 - sum_tau p_t(tau|x) F_c(tau); hazard held at h(J) past J."""
    lam_c = float(cm.rates(np.asarray(x)[None, :])[0])
    surv = 1.0
    acc = 0.0
    tau = 1
    while surv > tail and tau < 100_000:
        h = discrete_hazard(min(tau, hp.n_periods), x, hp)
        p_t = surv * h
        acc += p_t * float(_geometric_cdf(lam_c, np.array(tau)))
        surv *= 1.0 - h
        tau += 1
    return 1.0 - acc


def _logit_person_periods(x1: np.ndarray, t1: np.ndarray, J: int):
    """Expand labeled subjects into (subject, period, label) rows."""
    T = t1.astype(int)
    if np.any(T < 1) or np.any(T != t1):
        raise ValueError("discrete survival times must be integers >= 1")
    if T.max() > J:
        raise ValueError(f"max observed period {T.max()} exceeds J={J}")
    subj = np.repeat(np.arange(len(T)), T)
    period = np.concatenate([np.arange(1, Ti + 1) for Ti in T])
    y = (period == T[subj]).astype(float)
    return subj, period, y


def pu_logit_loss(
    data: Dataset, hp: DiscreteHazardParams, cm: KnownCensoringModel
) -> float:
    """Weighted negative Bernoulli log-likelihood over person-periods."""
    x1, t1 = _labeled_arrays(data)
    w = np.array([1.0 / discrete_event_probability(xi, hp, cm) for xi in x1])
    return _logit_loss_frozen(x1, t1, hp.n_periods, w,
                              np.concatenate([hp.alpha, hp.beta]))[0]


def _logit_loss_frozen(x1, t1, J, w, params):
    """Loss and gradient in the stacked (alpha, beta) parameterization."""
    alpha, beta = params[:J], params[J:]
    subj, period, y = _logit_person_periods(x1, t1, J)
    z = alpha[period - 1] + x1[subj] @ beta
    if not np.all(np.isfinite(z)):
        raise FloatingPointError("non-finite hazard logit")
    # -[y log h + (1-y) log(1-h)] with stable log-sigmoid
    log_h = -np.logaddexp(0.0, -z)
    log_1mh = -np.logaddexp(0.0, z)
    n1 = len(t1)
    row_w = w[subj] / n1
    loss = -float(np.sum(row_w * (y * log_h + (1 - y) * log_1mh)))
    h = 1.0 / (1.0 + np.exp(-z))
    resid = row_w * (h - y)
    g_alpha = np.bincount(period - 1, weights=resid, minlength=J)
    g_beta = x1[subj].T @ resid
    return loss, np.concatenate([g_alpha, g_beta])


def fit_loss(
    data: Dataset,
    loss: str,
    cm: KnownCensoringModel,
    init: Optional[np.ndarray] = None,
    outer_tolerance: float = 1e-6,
    max_outer_iters: int = 100,
) -> LossFitResult:
    """Alternate weight recomputation with frozen-weight minimization."""
    x1, t1 = _labeled_arrays(data)
    p = x1.shape[1]

    if loss == "cox":
        theta = np.zeros(p) if init is None else as_param_vector(init, p)
        converged = False
        it = 0
        for it in range(1, max_outer_iters + 1):
            w = _event_weights(x1, theta, cm)

            def f(v):
                terms, _ = _cox_terms(x1, t1, v)
                return float(np.mean(w * terms))

            def g(v):
                _, score = _cox_terms(x1, t1, v)
                return (w[:, None] * score).mean(axis=0)

            res = minimize(f, g, theta)
            delta = np.max(np.abs(res.x - theta))
            theta = res.x
            if delta <= outer_tolerance:
                converged = True
                break
        return LossFitResult(RiskFunction(tuple(theta)), converged, it)

    if loss == "logit":
        J = int(np.max(t1))
        n_par = J + p
        params = np.zeros(n_par) if init is None else as_param_vector(init, n_par)
        converged = False
        it = 0
        for it in range(1, max_outer_iters + 1):
            hp = DiscreteHazardParams(tuple(params[:J]), tuple(params[J:]))
            w = np.array([1.0 / discrete_event_probability(xi, hp, cm) for xi in x1])

            def f(v):
                return _logit_loss_frozen(x1, t1, J, w, v)[0]

            def g(v):
                return _logit_loss_frozen(x1, t1, J, w, v)[1]

            res = minimize(f, g, params)
            delta = np.max(np.abs(res.x - params))
            params = res.x
            if delta <= outer_tolerance:
                converged = True
                break
        return LossFitResult(
            DiscreteHazardParams(tuple(params[:J]), tuple(params[J:])), converged, it
        )

    raise ValueError(f"unknown loss {loss!r}; use 'cox' or 'logit'")
