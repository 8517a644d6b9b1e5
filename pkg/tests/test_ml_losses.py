import math

import numpy as np
import pytest

from pusurvive.estimator import minimize
from pusurvive.ml_losses import (
    DiscreteHazardParams,
    KnownCensoringModel,
    RiskFunction,
    _cox_terms,
    _labeled_arrays,
    discrete_event_probability,
    discrete_hazard,
    fit_loss,
    pu_cox_loss,
    pu_logit_loss,
    risk_set,
)
from pusurvive.model_core import Dataset, SubjectRecord

# with strictly positive covariates and a hugely negative theta_c the
# censoring rate is denormal-small and every weight rounds to exactly 1.0
NO_CENSORING = KnownCensoringModel((-150.0, -150.0))


def all_labeled(rng, n, theta=(1.0, 0.5)):
    x = np.abs(rng.normal([0.8, 0.6], [0.2, 0.2], (n, 2))) + 0.1
    t = rng.exponential(1.0 / np.exp(x @ np.asarray(theta)))
    recs = tuple(SubjectRecord(float(t[i]), None, 1, tuple(x[i])) for i in range(n))
    return Dataset(recs, 2, c_observed_for_labeled=False)


def discrete_labeled(seed, n=800, J=20, beta=(0.8, -0.5), alpha=-1.2):
    rng = np.random.default_rng(seed)
    x = 0.2 + np.abs(rng.normal([0.5, 0.3], [0.3, 0.3], (n, 2)))
    h = 1.0 / (1.0 + np.exp(-(alpha + x @ np.asarray(beta))))
    T = np.minimum(rng.geometric(h), J)
    recs = tuple(SubjectRecord(float(T[i]), None, 1, tuple(x[i])) for i in range(n))
    return Dataset(recs, 2, c_observed_for_labeled=False)


class TestRiskSet:
    def test_definition(self):
        assert risk_set([1.0, 2.0, 3.0], 1) == {1, 2}

    def test_max_time_singleton(self):
        assert risk_set([1.0, 2.0, 3.0], 2) == {2}

    def test_ties_mutual(self):
        times = [2.0, 2.0, 1.0]
        assert risk_set(times, 0) == {0, 1}
        assert risk_set(times, 1) == {0, 1}

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            risk_set([1.0, float("inf")], 0)


class TestPuCoxLoss:
    def test_weight_one_reduction_exact(self, rng):
        data = all_labeled(rng, 60)
        g = RiskFunction((0.7, -0.4))
        x1, t1 = _labeled_arrays(data)
        gv = x1 @ [0.7, -0.4]
        brute = np.mean(
            [
                math.log(sum(math.exp(gv[j] - gv[i]) for j in risk_set(t1, i)))
                for i in range(len(t1))
            ]
        )
        assert pu_cox_loss(data, g, NO_CENSORING) == pytest.approx(brute, rel=1e-12)

    def test_translation_invariance_exact(self, rng):
        # append a constant covariate; shifting its coefficient shifts g by
        # a constant, which the within-risk-set differences cancel exactly
        base = all_labeled(rng, 40)
        recs = tuple(
            SubjectRecord(r.survival_time, None, 1, r.covariates + (1.0,))
            for r in base.records
        )
        data = Dataset(recs, 3, c_observed_for_labeled=False)
        x1, t1 = _labeled_arrays(data)
        a, _ = _cox_terms(x1, t1, np.array([0.7, -0.4, 0.0]))
        b, _ = _cox_terms(x1, t1, np.array([0.7, -0.4, 5.0]))
        # identical up to the last-ulp wobble of the shifted dot products
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)

    def test_single_record_is_zero(self):
        d = Dataset(
            (SubjectRecord(1.0, None, 1, (0.5, 0.5)),), 2, c_observed_for_labeled=False
        )
        assert pu_cox_loss(d, RiskFunction((1.0, 1.0)), NO_CENSORING) == 0.0

    def test_weights_increase_loss_scale(self, rng):
        data = all_labeled(rng, 50)
        g = RiskFunction((0.5, 0.5))
        censored = KnownCensoringModel((0.5, 0.5))  # weights > 1
        assert pu_cox_loss(data, g, censored) > pu_cox_loss(data, g, NO_CENSORING)

    def test_requires_labeled_records(self):
        d = Dataset(
            (SubjectRecord(None, 1.0, 0, (0.5, 0.5)),), 2, c_observed_for_labeled=False
        )
        with pytest.raises(ValueError, match="no labeled events"):
            pu_cox_loss(d, RiskFunction((1.0, 1.0)), NO_CENSORING)

    def test_nonlinear_kind_rejected(self):
        with pytest.raises(NotImplementedError):
            RiskFunction((1.0,), kind="mlp")


class TestFitLossCox:
    def test_no_censoring_equals_unweighted_fit(self, rng):
        data = all_labeled(rng, 300)
        res = fit_loss(data, "cox", NO_CENSORING)
        x1, t1 = _labeled_arrays(data)

        def f(v):
            terms, _ = _cox_terms(x1, t1, v)
            return float(np.mean(terms))

        def g(v):
            _, score = _cox_terms(x1, t1, v)
            return score.mean(axis=0)

        unweighted = minimize(f, g, np.zeros(2))
        assert np.max(np.abs(np.asarray(res.params.params) - unweighted.x)) < 1e-4

    def test_recovers_truth(self, rng):
        data = all_labeled(rng, 2000, theta=(1.0, 0.5))
        res = fit_loss(data, "cox", NO_CENSORING)
        assert res.converged
        assert np.max(np.abs(np.asarray(res.params.params) - [1.0, 0.5])) < 0.25

    def test_unknown_loss_rejected(self, rng):
        with pytest.raises(ValueError, match="unknown loss"):
            fit_loss(all_labeled(rng, 10), "hinge", NO_CENSORING)


class TestDiscreteHazard:
    def test_logistic_zero(self):
        hp = DiscreteHazardParams((0.0,), (1.0, 2.0))
        assert discrete_hazard(1, (0.0, 0.0), hp) == 0.5

    def test_arithmetic(self):
        hp = DiscreteHazardParams((0.5,), (1.0, 2.0))
        assert discrete_hazard(1, (1.0, 0.0), hp) == pytest.approx(0.817574, abs=1e-6)

    def test_limits_and_range(self):
        lo = DiscreteHazardParams((-40.0,), (0.0, 0.0))
        hi = DiscreteHazardParams((40.0,), (0.0, 0.0))
        assert discrete_hazard(1, (0.0, 0.0), lo) == pytest.approx(0.0, abs=1e-12)
        assert discrete_hazard(1, (0.0, 0.0), hi) == pytest.approx(1.0, abs=1e-12)
        for a in np.linspace(-5, 5, 11):
            h = discrete_hazard(1, (0.0, 0.0), DiscreteHazardParams((float(a),), (0.0, 0.0)))
            assert 0.0 < h < 1.0

    def test_monotone_in_alpha(self):
        hs = [
            discrete_hazard(1, (0.5, 0.5), DiscreteHazardParams((a,), (1.0, 1.0)))
            for a in (-1.0, 0.0, 1.0)
        ]
        assert hs[0] < hs[1] < hs[2]

    def test_period_bounds(self):
        hp = DiscreteHazardParams((0.0, 0.0), (1.0,))
        with pytest.raises(ValueError, match="outside"):
            discrete_hazard(3, (0.0,), hp)


class TestDiscreteEventProbability:
    def test_no_censoring_gives_one(self):
        hp = DiscreteHazardParams((0.0,) * 5, (0.0, 0.0))
        p = discrete_event_probability((0.5, 0.5), hp, NO_CENSORING)
        assert p == pytest.approx(1.0, abs=1e-12)

    def test_heavier_censoring_lowers_probability(self):
        hp = DiscreteHazardParams((-1.0,) * 5, (0.0, 0.0))
        light = discrete_event_probability((0.5, 0.5), hp, KnownCensoringModel((-3.0, -3.0)))
        heavy = discrete_event_probability((0.5, 0.5), hp, KnownCensoringModel((-1.0, -1.0)))
        assert 0.0 < heavy < light <= 1.0


class TestPuLogitLoss:
    def test_single_bernoulli(self):
        d = Dataset(
            (SubjectRecord(1.0, None, 1, (0.5, 0.5)),), 2, c_observed_for_labeled=False
        )
        hp = DiscreteHazardParams((0.0,), (0.0, 0.0))
        got = pu_logit_loss(d, hp, NO_CENSORING)
        assert got == pytest.approx(-math.log(0.5), abs=1e-9)

    def test_additive_over_subjects(self):
        hp = DiscreteHazardParams((0.3, -0.2), (0.5, -0.5))
        r1 = SubjectRecord(2.0, None, 1, (0.4, 0.6))
        r2 = SubjectRecord(1.0, None, 1, (0.8, 0.2))
        d1 = Dataset((r1,), 2, c_observed_for_labeled=False)
        d2 = Dataset((r2,), 2, c_observed_for_labeled=False)
        both = Dataset((r1, r2), 2, c_observed_for_labeled=False)
        lhs = 2 * pu_logit_loss(both, hp, NO_CENSORING)
        rhs = pu_logit_loss(d1, hp, NO_CENSORING) + pu_logit_loss(d2, hp, NO_CENSORING)
        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_rejects_non_integer_times(self):
        d = Dataset(
            (SubjectRecord(1.5, None, 1, (0.5, 0.5)),), 2, c_observed_for_labeled=False
        )
        hp = DiscreteHazardParams((0.0, 0.0), (0.0, 0.0))
        with pytest.raises(ValueError, match="integers"):
            pu_logit_loss(d, hp, NO_CENSORING)

    def test_requires_labeled(self):
        d = Dataset(
            (SubjectRecord(None, 1.0, 0, (0.5, 0.5)),), 2, c_observed_for_labeled=False
        )
        hp = DiscreteHazardParams((0.0,), (0.0, 0.0))
        with pytest.raises(ValueError, match="no labeled events"):
            pu_logit_loss(d, hp, NO_CENSORING)


class TestFitLossLogit:
    def test_recovery(self):
        # scaled-down recovery study: 12 seeds at n=800, J=20
        cm = KnownCensoringModel((-3.0, -3.0))
        errs = []
        for seed in range(12):
            res = fit_loss(discrete_labeled(seed), "logit", cm)
            errs.append(np.max(np.abs(np.asarray(res.params.beta) - [0.8, -0.5])))
        assert np.mean(errs) <= 0.2
