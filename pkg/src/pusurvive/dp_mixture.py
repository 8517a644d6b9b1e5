"""Truncated stick-breaking Dirichlet-process gamma mixture.

Weights come from Beta(1, alpha) stick fractions with the final stick
closed (V_K := 1), so they form an exact probability vector. The mixture
event probability against exponential censoring has the closed form
sum_k pi_k (lambda_kt / (lambda_kt + lambda_c))^alpha_kt.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import (
    DistributionSpec,
    Family,
    QuadratureConfig,
    DEFAULT_QUADRATURE,
    pdf,
)
from .model_core import link_rate

__all__ = [
    "StickBreaking",
    "MixtureComponents",
    "BaseMeasure",
    "stick_weights",
    "mixture_density",
    "mixture_event_probability",
    "mixture_event_probability_quadrature",
    "sample_prior",
]


@dataclass(frozen=True)
class StickBreaking:
    """Stick fractions V_1..V_{K-1} in (0,1); the K-th stick is closed."""

    v: tuple[float, ...]
    alpha_dp: float
    truncation: int

    def __post_init__(self):
        if self.truncation < 1:
            raise ValueError("truncation must be >= 1")
        if len(self.v) != self.truncation - 1:
            raise ValueError(
                f"need {self.truncation - 1} stick fractions for K={self.truncation}"
            )
        if any(not 0 < vi < 1 for vi in self.v):
            raise ValueError("stick fractions must lie in (0, 1)")
        if self.alpha_dp <= 0:
            raise ValueError("alpha_dp must be > 0")


@dataclass(frozen=True)
class MixtureComponents:
    """Per-component gamma shape and regression coefficients."""

    shapes: tuple[float, ...]
    thetas: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if len(self.shapes) != len(self.thetas):
            raise ValueError("shapes and thetas must have the same length")
        if any(a <= 0 for a in self.shapes):
            raise ValueError("all shapes must be positive")

    def __len__(self) -> int:
        return len(self.shapes)


@dataclass(frozen=True)
class BaseMeasure:
    """Base measure G_0: normal for theta coordinates, log-normal for shapes."""

    theta_mean: float = 0.0
    theta_sd: float = 1.0
    log_shape_mean: float = 0.0
    log_shape_sd: float = 0.5


def stick_weights(sb: StickBreaking) -> np.ndarray:
    """Probability vector pi with the last weight absorbing the remainder."""
    v = np.asarray(sb.v, dtype=float)
    pi = np.empty(sb.truncation)
    remaining = 1.0
    for k in range(sb.truncation - 1):
        pi[k] = v[k] * remaining
        remaining *= 1.0 - v[k]
    pi[-1] = remaining
    return pi


def mixture_density(t: float, x, comps: MixtureComponents, pi: np.ndarray) -> float:
    """sum_k pi_k * gamma pdf(t; shape_k, exp(x' theta_k))."""
    pi = np.asarray(pi, dtype=float)
    if len(comps) != pi.size:
        raise ValueError("weights and components disagree in length")
    if not np.isclose(pi.sum(), 1.0):
        raise ValueError("weights must sum to 1")
    total = 0.0
    for k, (a, theta) in enumerate(zip(comps.shapes, comps.thetas)):
        lam = link_rate(x, theta)
        total += pi[k] * pdf(DistributionSpec(Family.GAMMA, a), lam, t)
    return total


def mixture_event_probability(
    x, comps: MixtureComponents, pi: np.ndarray, lambda_c: float
) -> float:
    """Closed-form P(y=1|x) for the gamma mixture with exponential censoring."""
    if lambda_c <= 0:
        raise ValueError("lambda_c must be > 0")
    pi = np.asarray(pi, dtype=float)
    total = 0.0
    for k, (a, theta) in enumerate(zip(comps.shapes, comps.thetas)):
        lam = link_rate(x, theta)
        total += pi[k] * (lam / (lam + lambda_c)) ** a
    return total


def mixture_event_probability_quadrature(
    x,
    comps: MixtureComponents,
    pi: np.ndarray,
    lambda_c: float,
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """Numeric oracle: 1 - int p_mix(u) F_c(u) du on the transformed interval."""
    from scipy import integrate

    def integrand(s: float) -> float:
        u = s / (1.0 - s)
        fc = -np.expm1(-lambda_c * u)
        return mixture_density(u, x, comps, pi) * fc / (1.0 - s) ** 2

    value, _ = integrate.quad(
        integrand,
        0.0,
        1.0,
        epsabs=quad.abs_tolerance,
        epsrel=quad.rel_tolerance,
        limit=quad.max_subdivisions,
    )
    return 1.0 - value


def sample_prior(
    alpha_dp: float,
    base: BaseMeasure,
    K: int,
    dimension: int,
    seed: int,
) -> tuple[StickBreaking, MixtureComponents]:
    """Draw stick fractions and component parameters from the prior."""
    if K < 1:
        raise ValueError("K must be >= 1")
    rng = np.random.default_rng(seed)
    # small concentrations round draws to exactly 1.0; keep the open interval
    draws = np.clip(rng.beta(1.0, alpha_dp, size=K - 1), 1e-12, 1.0 - 1e-12)
    v = tuple(float(u) for u in draws)
    shapes = tuple(
        float(s) for s in np.exp(rng.normal(base.log_shape_mean, base.log_shape_sd, size=K))
    )
    thetas = tuple(
        tuple(float(w) for w in rng.normal(base.theta_mean, base.theta_sd, size=dimension))
        for _ in range(K)
    )
    return StickBreaking(v, alpha_dp, K), MixtureComponents(shapes, thetas)
