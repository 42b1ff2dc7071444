"""Distribution, value-function, and instance primitives."""

from __future__ import annotations

import numpy as np
import pytest

from fairmix.core import (
    Distribution,
    FairPrior,
    InterpolationInstance,
    ParameterError,
    ValueFunction,
    WelfareMechanism,
    canonical_key,
    expected_value,
    is_alpha_fair,
    tv_distance,
)

from conftest import make_instance, random_simplex


class TestDistribution:
    def test_requires_normalization(self):
        with pytest.raises(ParameterError):
            Distribution({0: 0.5})

    def test_rejects_negative_probability(self):
        with pytest.raises(ParameterError):
            Distribution({0: 1.2, 1: -0.2})

    def test_drops_exact_zeros(self):
        d = Distribution({0: 0.5, 1: 0.0, 2: 0.5})
        assert d.support == (0, 2)
        assert d[1] == 0.0

    def test_point_mass(self):
        d = Distribution.point_mass(7)
        assert d.support == (7,)
        assert d[7] == 1.0

    def test_from_array(self):
        d = Distribution.from_array([0.25, 0.0, 0.75])
        assert d.as_dict() == {0: 0.25, 2: 0.75}

    def test_support_sorted(self):
        d = Distribution({5: 0.5, 1: 0.25, 3: 0.25})
        assert d.support == (1, 3, 5)

    def test_lookup_defaults_to_zero(self):
        d = Distribution.point_mass(0)
        assert d[99] == 0.0

    def test_items_iterates_support(self):
        d = Distribution({2: 0.5, 0: 0.5})
        assert list(d.items()) == [(0, 0.5), (2, 0.5)]


class TestTvDistance:
    def test_hand_value(self):
        p = Distribution({0: 0.2, 1: 0.8})
        q = Distribution({0: 0.6, 1: 0.4})
        assert tv_distance(p, q) == pytest.approx(0.4, abs=1e-15)

    def test_disjoint_supports(self):
        assert tv_distance(Distribution.point_mass(0), Distribution.point_mass(1)) == 1.0

    def test_identical_is_zero(self):
        p = Distribution({0: 0.3, 1: 0.7})
        assert tv_distance(p, p) == 0.0

    def test_symmetric_and_bounded(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            n = int(rng.integers(2, 12))
            p = Distribution.from_array(random_simplex(rng, n))
            q = Distribution.from_array(random_simplex(rng, n))
            d = tv_distance(p, q)
            assert d == pytest.approx(tv_distance(q, p), abs=1e-15)
            assert 0.0 <= d <= 1.0

    def test_alpha_fair_boundary(self):
        p = Distribution({0: 0.2, 1: 0.8})
        q = Distribution({0: 0.6, 1: 0.4})
        assert is_alpha_fair(p, q, 0.4)  # distance exactly 0.4
        assert not is_alpha_fair(p, q, 0.39)


class TestValueFunction:
    def test_from_array_and_call(self):
        v = ValueFunction.from_array([3.0, 1.0, 0.0])
        assert v(0) == 3.0 and v(2) == 0.0
        assert v.max_value() == 3.0

    def test_rejects_negative_values(self):
        with pytest.raises(ParameterError):
            ValueFunction.from_array([1.0, -0.1])

    def test_rejects_non_finite(self):
        with pytest.raises(ParameterError):
            ValueFunction.from_array([1.0, float("nan")])
        with pytest.raises(ParameterError):
            ValueFunction.from_array([1.0, float("inf")])

    def test_argmax_is_first_maximizer(self):
        assert ValueFunction.from_array([1.0, 3.0, 3.0]).argmax() == 1

    def test_wrapped_callable_negative_rejected(self):
        v = ValueFunction(lambda s: -1.0)
        with pytest.raises(ParameterError):
            v(0)


def test_expected_value_hand_case():
    dist = Distribution({0: 0.25, 1: 0.75})
    value = ValueFunction.from_array([4.0, 8.0])
    assert expected_value(dist, value) == pytest.approx(7.0, abs=1e-15)


class TestFairPrior:
    def test_from_distribution_sampling_law(self):
        dist = Distribution({0: 0.2, 1: 0.3, 2: 0.5})
        prior = FairPrior.from_distribution(dist)
        rng = np.random.default_rng(1)
        draws = prior.sample_many(rng, 20000)
        emp = Distribution.from_array(np.bincount(draws, minlength=3) / 20000)
        assert tv_distance(emp, dist) < 0.02
        assert prior.explicit is dist

    def test_single_sample_in_support(self):
        prior = FairPrior.from_distribution(Distribution({3: 0.5, 9: 0.5}))
        rng = np.random.default_rng(2)
        assert all(prior.sample(rng) in (3, 9) for _ in range(20))

    def test_sample_many_falls_back_to_loop(self):
        prior = FairPrior(sampler=lambda rng: 42)
        out = prior.sample_many(np.random.default_rng(0), 5)
        assert list(out) == [42] * 5


class TestWelfareMechanism:
    def test_constant_returns_solution(self):
        m = WelfareMechanism.constant(5, lam=0.5)
        assert m.run(np.random.default_rng(0)) == 5
        assert m.lam == 0.5

    @pytest.mark.parametrize("lam", [0.0, -0.5, 1.5])
    def test_lambda_out_of_range(self, lam):
        with pytest.raises(ParameterError):
            WelfareMechanism.constant(0, lam=lam)


class TestInterpolationInstance:
    @pytest.mark.parametrize("alpha", [-0.01, 1.01])
    def test_alpha_out_of_range(self, alpha):
        with pytest.raises(ParameterError):
            make_instance([1.0, 0.0], [0.5, 0.5], alpha)

    def test_endpoints_allowed(self):
        for alpha in (0.0, 1.0):
            inst = make_instance([1.0, 0.0], [0.5, 0.5], alpha)
            assert inst.alpha == alpha


class TestCanonicalKey:
    def test_int_sorts_as_itself(self):
        assert canonical_key(5) == 5
        assert canonical_key(np.int64(5)) == 5

    def test_tuple_passes_through(self):
        assert canonical_key((1, 2)) == (1, 2)

    def test_object_with_sort_key(self):
        class Sol:
            def sort_key(self):
                return (3, 1)

        assert canonical_key(Sol()) == (3, 1)

    def test_unorderable_rejected(self):
        with pytest.raises(TypeError):
            canonical_key(object())
