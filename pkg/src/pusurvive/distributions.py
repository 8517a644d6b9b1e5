"""Densities, CDFs and the event probability P(y=1|x) for the three families.

Parameterizations follow the regression models used throughout:

* exponential: p(t) = lam * exp(-lam t)
* gamma(a):    p(t) = t^(a-1) lam^a exp(-lam t) / Gamma(a)   (rate form)
* weibull(a):  p(t) = a t^(a-1) lam exp(-lam t^a)

Note the Weibull form does not raise lam to a power; this deliberately
differs from the common textbook parameterization.

The event probability P(y=1|x) = 1 - int_0^inf p_t(u) F_c(u) du has closed
forms for exponential/gamma survival with exponential censoring; every other
family pair is integrated numerically on (0, inf) via the substitution
u = s/(1-s).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

__all__ = [
    "Family",
    "DistributionSpec",
    "QuadratureConfig",
    "QuadratureError",
    "EXPONENTIAL",
    "pdf",
    "cdf",
    "event_probability",
    "event_probability_quadrature",
]


class Family(enum.Enum):
    EXPONENTIAL = "exponential"
    GAMMA = "gamma"
    WEIBULL = "weibull"


@dataclass(frozen=True)
class DistributionSpec:
    """Family tag plus shape. Shape is ignored for the exponential (alpha=1)."""

    family: Family
    shape: float = 1.0

    def __post_init__(self):
        if not (self.shape > 0 and math.isfinite(self.shape)):
            raise ValueError(f"shape must be positive and finite, got {self.shape}")


EXPONENTIAL = DistributionSpec(Family.EXPONENTIAL)


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tolerance: float = 1e-10
    rel_tolerance: float = 1e-8
    max_subdivisions: int = 200

    def __post_init__(self):
        if self.abs_tolerance <= 0 or self.rel_tolerance <= 0:
            raise ValueError("quadrature tolerances must be > 0")


DEFAULT_QUADRATURE = QuadratureConfig()


class QuadratureError(RuntimeError):
    """Raised when the adaptive quadrature cannot meet the requested tolerance."""

    def __init__(self, message: str, achieved_error: float):
        super().__init__(f"{message} (achieved error estimate {achieved_error:.3e})")
        self.achieved_error = achieved_error


def _check_positive(name: str, v: float) -> None:
    if not (v > 0 and math.isfinite(v)):
        raise ValueError(f"{name} must be positive and finite, got {v}")


def pdf(spec: DistributionSpec, rate: float, t) -> float:
    """Density at t for the given family with rate lam; vectorized over t."""
    _check_positive("rate", rate)
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0) or not np.all(np.isfinite(t)):
        raise ValueError("t must be positive and finite")
    a = 1.0 if spec.family is Family.EXPONENTIAL else spec.shape
    if spec.family is Family.WEIBULL:
        # log-space form avoids inf*0 at extreme t
        out = np.exp(
            np.log(a) + (a - 1.0) * np.log(t) + np.log(rate) - rate * t**a
        )
    else:
        out = np.exp(
            (a - 1.0) * np.log(t) + a * np.log(rate) - rate * t - special.gammaln(a)
        )
    return out if out.ndim else float(out)


def cdf(spec: DistributionSpec, rate: float, t) -> float:
    """CDF at t; gamma uses the regularized lower incomplete gamma function."""
    _check_positive("rate", rate)
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0) or not np.all(np.isfinite(t)):
        raise ValueError("t must be positive and finite")
    a = 1.0 if spec.family is Family.EXPONENTIAL else spec.shape
    if spec.family is Family.WEIBULL:
        out = -np.expm1(-rate * t**a)
    elif spec.family is Family.GAMMA:
        out = special.gammainc(a, rate * t)
    else:
        out = -np.expm1(-rate * t)
    return out if out.ndim else float(out)


def _is_exponential_like(spec: DistributionSpec) -> bool:
    return spec.family is Family.EXPONENTIAL


def event_probability(
    t_spec: DistributionSpec,
    c_spec: DistributionSpec,
    lambda_t: float,
    lambda_c: float,
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """P(y=1|x) = P(t < c), closed form where available, else quadrature.

    Closed forms: exponential or gamma survival with exponential censoring
    gives (lambda_t / (lambda_t + lambda_c))^alpha_t.
    """
    _check_positive("lambda_t", lambda_t)
    _check_positive("lambda_c", lambda_c)
    if c_spec.family is Family.EXPONENTIAL and t_spec.family in (
        Family.EXPONENTIAL,
        Family.GAMMA,
    ):
        a = 1.0 if t_spec.family is Family.EXPONENTIAL else t_spec.shape
        return (lambda_t / (lambda_t + lambda_c)) ** a
    return event_probability_quadrature(t_spec, c_spec, lambda_t, lambda_c, quad)


def event_probability_quadrature(
    t_spec: DistributionSpec,
    c_spec: DistributionSpec,
    lambda_t: float,
    lambda_c: float,
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """Always-numeric evaluation of 1 - int_0^inf p_t(u) F_c(u) du.

    Used as the oracle cross-checking the analytic dispatch.
    """
    _check_positive("lambda_t", lambda_t)
    _check_positive("lambda_c", lambda_c)

    def integrand(s: float) -> float:
        # u = s/(1-s) maps (0,1) -> (0,inf); du = ds/(1-s)^2
        u = s / (1.0 - s)
        return (
            pdf(t_spec, lambda_t, u)
            * cdf(c_spec, lambda_c, u)
            / (1.0 - s) ** 2
        )

    value, err = integrate.quad(
        integrand,
        0.0,
        1.0,
        epsabs=quad.abs_tolerance,
        epsrel=quad.rel_tolerance,
        limit=quad.max_subdivisions,
    )
    if err > max(quad.abs_tolerance, quad.rel_tolerance * abs(value)) * 10:
        raise QuadratureError("event probability quadrature did not converge", err)
    return 1.0 - value
