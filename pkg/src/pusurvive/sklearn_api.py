"""Scikit-learn style front end for the PU survival estimator.

`PUSurvivalEstimator` wraps the alternating maximum-likelihood fit behind
the familiar fit/predict/get_params surface so it composes with the wider
ecosystem. Inputs are plain arrays; the fitted attributes carry the
estimated rate-regression coefficients for survival and censoring times
and their asymptotic standard errors.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .estimator import FitOptions, fit_alternating
from .model_core import (
    CensoringMode,
    Dataset,
    Estimator,
    ModelVariant,
    SubjectRecord,
    validate_dataset,
)

__all__ = ["PUSurvivalEstimator"]


class PUSurvivalEstimator(BaseEstimator):
    """Exponential survival/censoring regression under PU labeling.

    Parameters
    ----------
    estimator : {"pusa", "conventional"}
        Whether to use the PU-aware likelihood or the conventional baseline
        that treats the selection label as the censoring indicator.
    censoring : {"observed", "unobserved"}
        Whether labeled records carry a censoring time.
    outer_tolerance : float
        Max-norm threshold on parameter updates per alternating cycle.
    max_outer_iters : int
        Cap on alternating cycles.

    Attributes
    ----------
    theta_t_ : ndarray of shape (p,)
        Survival-rate regression coefficients.
    theta_c_ : ndarray of shape (p,)
        Censoring-rate regression coefficients.
    se_t_, se_c_ : ndarray or None
        Asymptotic standard errors from the observed information.
    """

    def __init__(
        self,
        estimator: str = "pusa",
        censoring: str = "observed",
        outer_tolerance: float = 1e-6,
        max_outer_iters: int = 100,
    ):
        self.estimator = estimator
        self.censoring = censoring
        self.outer_tolerance = outer_tolerance
        self.max_outer_iters = max_outer_iters

    def _variant(self) -> ModelVariant:
        return ModelVariant(Estimator(self.estimator), CensoringMode(self.censoring))

    def fit(self, X, s, t=None, c=None):
        """Fit from columnar arrays.

        Parameters
        ----------
        X : array-like of shape (n, p)
            Covariates.
        s : array-like of shape (n,)
            Selection labels in {0, 1}.
        t : array-like of shape (n,), NaN where absent
            Survival times (required where s=1).
        c : array-like of shape (n,), NaN where absent
            Censoring times.
        """
        X = check_array(X, dtype=float)
        n, p = X.shape
        s = np.asarray(s).astype(int)
        t = np.full(n, np.nan) if t is None else np.asarray(t, dtype=float)
        c = np.full(n, np.nan) if c is None else np.asarray(c, dtype=float)
        if not (len(s) == len(t) == len(c) == n):
            raise ValueError("X, s, t, c must have the same length")

        mode_observed = CensoringMode(self.censoring) is CensoringMode.C_OBSERVED
        records = []
        for i in range(n):
            ti = None if np.isnan(t[i]) else float(t[i])
            ci = None if np.isnan(c[i]) else float(c[i])
            if s[i] == 1 and not mode_observed:
                ci = None
            records.append(SubjectRecord(ti, ci, int(s[i]), tuple(X[i])))
        data = Dataset(tuple(records), p, c_observed_for_labeled=mode_observed)
        problems = validate_dataset(data)
        if problems:
            raise ValueError("invalid input data: " + "; ".join(problems[:5]))

        opts = FitOptions(
            outer_tolerance=self.outer_tolerance, max_outer_iters=self.max_outer_iters
        )
        result = fit_alternating(data, self._variant(), opts)
        self.result_ = result
        self.theta_t_ = result.theta_t_hat
        self.theta_c_ = result.theta_c_hat
        self.se_t_ = result.se_t
        self.se_c_ = result.se_c
        self.n_features_in_ = p
        return self

    def predict(self, X):
        """Predicted event probability P(y=1|x) = lam_t / (lam_t + lam_c)."""
        check_is_fitted(self, "theta_t_")
        X = check_array(X, dtype=float)
        lam_t = np.exp(X @ self.theta_t_)
        lam_c = np.exp(X @ self.theta_c_)
        return lam_t / (lam_t + lam_c)

    def predict_expected_survival_time(self, X):
        """Expected survival time 1 / lam_t under the exponential model."""
        check_is_fitted(self, "theta_t_")
        X = check_array(X, dtype=float)
        return np.exp(-(X @ self.theta_t_))
