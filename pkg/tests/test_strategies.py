"""Probability curves, the dominance chain, and the splitter optimizer."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coherentid.strategies import (
    CURVE_FUNCTIONS,
    Priors,
    bs_exponents,
    mean_p_universal,
    optimize_t1,
    p_bs,
    p_bs_delta,
    p_idp_known,
    p_opt,
    p_sb,
    p_sbf,
    verify_ordering,
)


class TestPriors:
    def test_must_sum_to_one(self):
        with pytest.raises(ValueError):
            Priors(0.6, 0.6)

    def test_range(self):
        with pytest.raises(ValueError):
            Priors(-0.1, 1.1)

    def test_equal(self):
        assert Priors.equal() == Priors(0.5, 0.5)


class TestCurveValues:
    # Frozen closed-form evaluations at unit separation.
    @pytest.mark.parametrize(
        "func, at_one",
        [
            (p_sb, 0.15803013970713942),
            (p_opt, 0.21070685294285257),
            (p_sbf, 0.1967346701436833),
            (p_idp_known, 0.3934693402873666),
        ],
    )
    def test_unit_separation(self, func, at_one):
        assert func(1.0) == pytest.approx(at_one, abs=1e-15)

    def test_all_zero_at_origin(self):
        for func in (p_sb, p_opt, p_sbf, p_idp_known):
            assert func(0.0) == 0.0
        assert p_bs(1.0, 1.0, 0.5, Priors.equal()) == 0.0

    @pytest.mark.parametrize(
        "func, limit", [(p_sb, 0.25), (p_opt, 1 / 3), (p_sbf, 0.5), (p_idp_known, 1.0)]
    )
    def test_large_separation_limits(self, func, limit):
        assert func(50.0) == pytest.approx(limit, abs=1e-12)

    def test_negative_separation_rejected(self):
        with pytest.raises(ValueError):
            p_sb(-0.5)

    @given(st.floats(0.0, 20.0), st.floats(0.0, 20.0))
    @settings(max_examples=200)
    def test_monotone_nondecreasing(self, x, y):
        lo, hi = sorted((x, y))
        for func in CURVE_FUNCTIONS.values():
            assert func(lo) <= func(hi) + 1e-15


class TestBeamsplitterCurve:
    def test_exponents_at_half(self):
        f1, f2 = bs_exponents(0.5)
        assert f1 == pytest.approx(1 / 3, abs=1e-16)
        assert f2 == pytest.approx(1 / 3, abs=1e-16)

    def test_unit_separation_value(self):
        value = p_bs(0.0, 1.0, 0.5, Priors.equal())
        assert value == pytest.approx(0.2834686894262107, abs=1e-15)

    def test_closed_form_identity_on_random_pairs(self):
        # At the balanced setting and equal priors the curve collapses to
        # 1 - exp(-|delta|^2 / 3).
        rng = np.random.default_rng(7)
        for _ in range(100):
            a1 = complex(*rng.normal(scale=2, size=2))
            a2 = complex(*rng.normal(scale=2, size=2))
            expected = 1.0 - math.exp(-abs(a1 - a2) ** 2 / 3.0)
            assert abs(p_bs(a1, a2, 0.5, Priors.equal()) - expected) <= 1e-14

    def test_t1_domain(self):
        with pytest.raises(ValueError):
            p_bs(0.0, 1.0, 0.0, Priors.equal())

    @pytest.mark.parametrize("delta", [0.3, 1.0, 2.5])
    def test_stationary_at_half_for_equal_priors(self, delta):
        h = 1e-4
        up = p_bs_delta(delta, 0.5 + h, Priors.equal())
        down = p_bs_delta(delta, 0.5 - h, Priors.equal())
        assert abs((up - down) / (2 * h)) <= 1e-6


class TestOptimizeT1:
    @pytest.mark.parametrize("delta", [0.5, 1.0, 2.0, 4.0])
    def test_equal_priors_optimum_is_half(self, delta):
        assert optimize_t1(0.0, delta, Priors.equal()) == pytest.approx(0.5, abs=1e-6)

    def test_lopsided_toward_first_reference(self):
        # Weighting hypothesis 1 favors the largest match-1 exponent
        # (1-T1)/(2-T1), which is maximized at T1 -> 0; grid-scan verified.
        assert optimize_t1(0.0, 1.0, Priors.from_eta1(0.999)) < 0.01

    def test_lopsided_toward_second_reference(self):
        assert optimize_t1(0.0, 1.0, Priors.from_eta1(0.001)) > 0.99

    def test_optimum_beats_neighbors(self):
        priors = Priors.from_eta1(0.3)
        star = optimize_t1(0.0, 1.5, priors)
        best = p_bs(0.0, 1.5, star, priors)
        for t in np.linspace(0.01, 0.99, 99):
            assert p_bs(0.0, 1.5, float(t), priors) <= best + 1e-12

    def test_degenerate_references(self):
        with pytest.raises(ValueError):
            optimize_t1(0.7, 0.7, Priors.equal())


class TestOrdering:
    def test_single_origin_point(self):
        report = verify_ordering([0.0])
        assert report.passed
        assert report.max_violation <= 0.0

    def test_standard_grid(self):
        report = verify_ordering(np.linspace(0.0, 3.0, 301))
        assert report.n_violations == 0
        assert report.max_violation <= 0.0

    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError):
            verify_ordering([])

    @given(
        st.lists(st.floats(0.0, 10.0), min_size=1, max_size=50).map(np.array)
    )
    @settings(max_examples=100)
    def test_random_grids_never_violate(self, grid):
        assert verify_ordering(grid).n_violations == 0


class TestUniversalMeans:
    def test_swap_based_qubits(self):
        assert mean_p_universal(2, "sb") == pytest.approx(1 / 8, abs=1e-16)

    def test_optimal_qubits(self):
        assert mean_p_universal(2, "opt") == pytest.approx(1 / 6, abs=1e-16)

    def test_large_dimension_limit(self):
        assert mean_p_universal(10_000_000, "sb") == pytest.approx(0.25, abs=1e-7)

    def test_domain(self):
        with pytest.raises(ValueError):
            mean_p_universal(1, "sb")
        with pytest.raises(ValueError):
            mean_p_universal(3, "bogus")
