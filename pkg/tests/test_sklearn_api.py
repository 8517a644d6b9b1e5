import numpy as np
import pytest
from sklearn.base import clone

from pusurvive.estimator import fit_alternating
from pusurvive.model_core import PUSA_C_OBSERVED, PUSA_C_UNOBSERVED
from pusurvive.simulation import DgpConfig, generate
from pusurvive.sklearn_api import PUSurvivalEstimator


def columnar(dataset):
    x, s, t, c = dataset.arrays()
    return x, s.astype(int), t, c


class TestEstimatorApi:
    def test_get_set_params_round_trip(self):
        est = PUSurvivalEstimator(estimator="conventional", censoring="unobserved")
        params = est.get_params()
        assert params["estimator"] == "conventional"
        cloned = clone(est)
        assert cloned.get_params() == params

    def test_fit_matches_functional_path(self):
        data, _, _ = generate(DgpConfig(n_raw=800, seed=14))
        X, s, t, c = columnar(data)
        est = PUSurvivalEstimator().fit(X, s, t, c)
        direct = fit_alternating(data, PUSA_C_OBSERVED)
        assert np.allclose(est.theta_t_, direct.theta_t_hat)
        assert np.allclose(est.theta_c_, direct.theta_c_hat)
        assert np.allclose(est.se_t_, direct.se_t)

    def test_predict_event_probability(self):
        data, _, _ = generate(DgpConfig(n_raw=800, seed=14))
        X, s, t, c = columnar(data)
        est = PUSurvivalEstimator().fit(X, s, t, c)
        p = est.predict(X[:20])
        assert p.shape == (20,)
        assert np.all((p > 0) & (p < 1))

    def test_predict_expected_survival_time(self):
        data, _, _ = generate(DgpConfig(n_raw=800, seed=14))
        X, s, t, c = columnar(data)
        est = PUSurvivalEstimator().fit(X, s, t, c)
        e = est.predict_expected_survival_time(X[:5])
        assert np.all(e > 0)
        # exponential mean is 1 / lambda_t
        assert np.allclose(e, np.exp(-(X[:5] @ est.theta_t_)))

    def test_unobserved_mode_drops_labeled_c(self):
        data, _, _ = generate(DgpConfig(n_raw=800, seed=14))
        X, s, t, c = columnar(data)
        est = PUSurvivalEstimator(censoring="unobserved").fit(X, s, t, c)
        direct = fit_alternating(data.to_c_unobserved(), PUSA_C_UNOBSERVED)
        assert np.allclose(est.theta_t_, direct.theta_t_hat)

    def test_invalid_data_raises(self):
        X = np.array([[1.0, 0.0]])
        with pytest.raises(ValueError, match="invalid input data"):
            PUSurvivalEstimator().fit(X, [1], t=None, c=None)

    def test_predict_before_fit_raises(self):
        from sklearn.exceptions import NotFittedError

        with pytest.raises(NotFittedError):
            PUSurvivalEstimator().predict(np.zeros((1, 2)))
