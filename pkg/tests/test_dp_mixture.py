import numpy as np
import pytest
from scipy import integrate

from pusurvive.distributions import DistributionSpec, Family, event_probability, pdf
from pusurvive.dp_mixture import (
    BaseMeasure,
    MixtureComponents,
    StickBreaking,
    mixture_density,
    mixture_event_probability,
    mixture_event_probability_quadrature,
    sample_prior,
    stick_weights,
)


class TestStickWeights:
    def test_k1_closed_stick(self):
        sb = StickBreaking((), 1.0, 1)
        assert stick_weights(sb).tolist() == [1.0]

    def test_k2_remainder(self):
        sb = StickBreaking((0.5,), 1.0, 2)
        assert stick_weights(sb).tolist() == [0.5, 0.5]

    def test_k3_product_formula(self):
        sb = StickBreaking((0.5, 0.5), 1.0, 3)
        assert stick_weights(sb).tolist() == [0.5, 0.25, 0.25]

    def test_probability_vector(self, rng):
        for _ in range(20):
            K = int(rng.integers(1, 10))
            v = tuple(rng.uniform(0.01, 0.99, size=K - 1))
            pi = stick_weights(StickBreaking(v, 1.0, K))
            assert np.all(pi >= 0)
            assert abs(pi.sum() - 1.0) <= 1e-15

    def test_validation(self):
        with pytest.raises(ValueError):
            StickBreaking((1.5,), 1.0, 2)
        with pytest.raises(ValueError):
            StickBreaking((0.5,), 1.0, 3)
        with pytest.raises(ValueError):
            StickBreaking((), -1.0, 1)


class TestMixtureDensity:
    def test_k1_equals_single_gamma(self):
        comps = MixtureComponents((2.0,), ((1.0, 0.5),))
        x = (0.5, 0.5)
        lam = np.exp(np.dot(x, (1.0, 0.5)))
        spec = DistributionSpec(Family.GAMMA, 2.0)
        for t in (0.1, 1.0, 3.0):
            assert mixture_density(t, x, comps, np.array([1.0])) == pytest.approx(
                pdf(spec, lam, t), rel=1e-15
            )

    def test_identical_components_degenerate(self):
        comps = MixtureComponents((1.5, 1.5), ((0.3, 0.2), (0.3, 0.2)))
        single = MixtureComponents((1.5,), ((0.3, 0.2),))
        got = mixture_density(0.7, (1.0, 1.0), comps, np.array([0.3, 0.7]))
        want = mixture_density(0.7, (1.0, 1.0), single, np.array([1.0]))
        assert got == pytest.approx(want, rel=1e-12)

    def test_integrates_to_one(self):
        comps = MixtureComponents((0.8, 2.5), ((0.5, 0.1), (-0.2, 0.4)))
        pi = np.array([0.4, 0.6])
        total, _ = integrate.quad(
            lambda s: mixture_density(s / (1 - s), (0.6, 0.4), comps, pi) / (1 - s) ** 2,
            0,
            1,
        )
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_weight_validation(self):
        comps = MixtureComponents((1.0,), ((0.0, 0.0),))
        with pytest.raises(ValueError, match="sum to 1"):
            mixture_density(1.0, (0.0, 0.0), comps, np.array([0.7]))
        with pytest.raises(ValueError, match="disagree"):
            mixture_density(1.0, (0.0, 0.0), comps, np.array([0.5, 0.5]))


class TestMixtureEventProbability:
    def test_k1_exponential_component(self):
        comps = MixtureComponents((1.0,), ((1.0, 0.5),))
        x = (0.5, 0.5)
        lam = np.exp(np.dot(x, (1.0, 0.5)))
        got = mixture_event_probability(x, comps, np.array([1.0]), 2.0)
        assert got == pytest.approx(lam / (lam + 2.0), rel=1e-15)

    def test_matched_rates_give_half(self):
        comps = MixtureComponents((1.0, 1.0), ((0.0, 0.0), (0.0, 0.0)))
        got = mixture_event_probability((0.0, 0.0), comps, np.array([0.5, 0.5]), 1.0)
        assert got == pytest.approx(0.5)

    def test_k1_matches_distributions_module(self):
        comps = MixtureComponents((2.5,), ((0.4, -0.1),))
        x = (0.8, 0.3)
        lam = np.exp(np.dot(x, (0.4, -0.1)))
        want = event_probability(
            DistributionSpec(Family.GAMMA, 2.5), DistributionSpec(Family.EXPONENTIAL), lam, 1.3
        )
        got = mixture_event_probability(x, comps, np.array([1.0]), 1.3)
        assert got == want

    def test_convex_hull_bound(self, rng):
        for _ in range(20):
            K = int(rng.integers(2, 5))
            comps = MixtureComponents(
                tuple(rng.uniform(0.5, 3.0, size=K)),
                tuple(tuple(rng.normal(0, 0.5, size=2)) for _ in range(K)),
            )
            v = tuple(rng.uniform(0.05, 0.95, size=K - 1))
            pi = stick_weights(StickBreaking(v, 1.0, K))
            x = tuple(rng.normal(0.5, 0.5, size=2))
            lam_c = float(rng.uniform(0.3, 3.0))
            per_comp = [
                mixture_event_probability(
                    x, MixtureComponents((comps.shapes[k],), (comps.thetas[k],)), np.array([1.0]), lam_c
                )
                for k in range(K)
            ]
            got = mixture_event_probability(x, comps, pi, lam_c)
            assert min(per_comp) - 1e-12 <= got <= max(per_comp) + 1e-12

    def test_closed_form_matches_quadrature(self, rng):
        # the 100-configuration sweep is in the acceptance suite
        for _ in range(10):
            K = int(rng.integers(1, 4))
            comps = MixtureComponents(
                tuple(rng.uniform(0.5, 3.0, size=K)),
                tuple(tuple(rng.normal(0, 0.5, size=2)) for _ in range(K)),
            )
            v = tuple(rng.uniform(0.05, 0.95, size=K - 1))
            pi = stick_weights(StickBreaking(v, 1.0, K))
            x = tuple(rng.normal(0.5, 0.5, size=2))
            lam_c = float(rng.uniform(0.3, 3.0))
            a = mixture_event_probability(x, comps, pi, lam_c)
            b = mixture_event_probability_quadrature(x, comps, pi, lam_c)
            assert abs(a - b) <= 1e-7

    def test_rejects_bad_rate(self):
        comps = MixtureComponents((1.0,), ((0.0, 0.0),))
        with pytest.raises(ValueError):
            mixture_event_probability((0.0, 0.0), comps, np.array([1.0]), 0.0)


class TestSamplePrior:
    def test_deterministic(self):
        a = sample_prior(1.0, BaseMeasure(), 5, 2, seed=3)
        b = sample_prior(1.0, BaseMeasure(), 5, 2, seed=3)
        assert a == b

    def test_shapes(self):
        sb, comps = sample_prior(1.0, BaseMeasure(), 7, 3, seed=0)
        assert sb.truncation == 7 and len(sb.v) == 6
        assert len(comps) == 7
        assert all(len(th) == 3 for th in comps.thetas)
        assert all(a > 0 for a in comps.shapes)

    def test_small_concentration_dominant_first_stick(self):
        pi1 = [
            stick_weights(sample_prior(0.01, BaseMeasure(), 5, 2, seed=s)[0])[0]
            for s in range(300)
        ]
        assert np.mean(pi1) > 0.99

    def test_validation(self):
        with pytest.raises(ValueError):
            sample_prior(1.0, BaseMeasure(), 0, 2, seed=0)
