"""N-reference search: schedules, circuit topology, and success statistics."""

import math

import numpy as np
import pytest

from coherentid.database import (
    DatabaseSpec,
    ScheduleEntry,
    build_database_circuit,
    circuit_exponent_constant,
    classify_database,
    comparator_schedule,
    count_database_outcomes,
    database_input,
    distribution_schedule,
    monitored_amplitudes,
    published_exponent_constant,
    ring_probability,
    run_database_mc,
    success_probability,
)
from coherentid.optics import ClickPattern, build_ui2_circuit, run_circuit, ui2_input


class TestSchedules:
    def test_two_references(self):
        entries = distribution_schedule(2)
        assert len(entries) == 1
        assert entries[0].transmittivity == pytest.approx(0.5)

    def test_three_references(self):
        ts = [e.transmittivity for e in distribution_schedule(3)]
        assert ts == pytest.approx([2 / 3, 1 / 2])

    def test_comparators_share_one_setting(self):
        entries = comparator_schedule(4)
        assert len(entries) == 4
        assert all(e.transmittivity == pytest.approx(1 / 5) for e in entries)

    def test_domain(self):
        with pytest.raises(ValueError):
            distribution_schedule(1)
        with pytest.raises(ValueError):
            comparator_schedule(1)

    def test_stage_validation(self):
        with pytest.raises(ValueError):
            ScheduleEntry("noop", 1, 0.5)

    @pytest.mark.parametrize("n", [2, 3, 5, 8])
    def test_distribution_splits_equally(self, n):
        # Run only the distribution stage and check every split amplitude.
        from coherentid.optics import BeamsplitterOp, Circuit, CoherentRegister

        probe = n - 1
        alpha = 0.8 - 0.6j
        ops = tuple(
            BeamsplitterOp(e.j - 1, probe, e.transmittivity)
            for e in distribution_schedule(n)
        )
        circuit = Circuit(n, ops, ())
        amps = np.zeros(n, dtype=complex)
        amps[probe] = alpha
        out = run_circuit(circuit, CoherentRegister(amps))
        assert np.max(np.abs(out.amplitudes - alpha / math.sqrt(n))) <= 1e-14


class TestCircuitTopology:
    @pytest.mark.parametrize("n, expected", [(2, 3), (3, 5), (5, 9)])
    def test_splitter_count(self, n, expected):
        spec = DatabaseSpec.ring(1.0, n)
        assert len(build_database_circuit(spec).ops) == expected

    def test_mode_count_and_detectors(self):
        spec = DatabaseSpec.ring(1.0, 3)
        circuit = build_database_circuit(spec)
        assert circuit.n_modes == 6
        assert circuit.monitored_modes == (3, 4, 5)

    def test_input_layout(self):
        spec = DatabaseSpec(
            references=(1.0, 2.0j), priors=(0.5, 0.5), true_index=2
        )
        reg = database_input(spec)
        assert reg.amplitudes[0] == 0.0        # ancilla vacuum
        assert reg.amplitudes[1] == 2.0j       # probe carries reference 2
        assert reg.amplitudes[2] == 1.0
        assert reg.amplitudes[3] == 2.0j


class TestMonitoredAmplitudes:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_matching_detector_is_vacuum(self, n):
        spec = DatabaseSpec.ring(1.4, n, true_index=min(2, n))
        amps = monitored_amplitudes(spec)
        assert abs(amps[spec.true_index - 1]) <= 1e-12

    def test_mismatch_amplitudes(self):
        # Detector k must carry |alpha_k - alpha_?| / sqrt(N + 1).
        rng = np.random.default_rng(21)
        n = 4
        refs = tuple(complex(*rng.normal(size=2)) for _ in range(n))
        spec = DatabaseSpec(refs, (1 / n,) * n, true_index=3)
        amps = monitored_amplitudes(spec)
        probe = refs[2]
        for k in range(n):
            expected = abs(refs[k] - probe) / math.sqrt(n + 1)
            assert abs(amps[k]) == pytest.approx(expected, abs=1e-14)

    def test_out_of_promise_probe(self):
        spec = DatabaseSpec.ring(1.0, 3)
        amps = monitored_amplitudes(spec, alpha_probe=5.0)
        assert np.min(np.abs(amps)) > 0.1  # no detector is guaranteed silent


class TestTwoReferenceReduction:
    def test_same_monitored_amplitudes_as_dedicated_circuit(self):
        a1, a2 = 0.9 + 0.2j, -0.4 + 1.1j
        spec = DatabaseSpec((a1, a2), (0.5, 0.5), true_index=1)
        db_amps = monitored_amplitudes(spec)

        circuit = build_ui2_circuit(0.5)
        out = run_circuit(circuit, ui2_input(a1, a1, a2))
        ui2_amps = out.amplitudes[list(circuit.monitored_modes)]

        # Dedicated circuit monitors (probe-mode, ref2-mode); detector 1 of
        # the database carries the same mismatch modulus, detector 2 the
        # identical amplitude.
        assert abs(db_amps[0]) == pytest.approx(abs(ui2_amps[0]), abs=1e-15)
        assert db_amps[1] == pytest.approx(ui2_amps[1], abs=1e-15)

    def test_success_probability_reduces_to_closed_form(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            a1 = complex(*rng.normal(size=2))
            a2 = complex(*rng.normal(size=2))
            spec = DatabaseSpec((a1, a2), (0.5, 0.5), true_index=1)
            expected = 1.0 - math.exp(-abs(a1 - a2) ** 2 / 3.0)
            assert abs(success_probability(spec) - expected) <= 1e-14


class TestClassification:
    def test_single_silent_detector(self):
        assert classify_database(ClickPattern((True, False, True))) == 2

    def test_multiple_silent_is_inconclusive(self):
        assert classify_database(ClickPattern((False, False, True))) is None

    def test_all_clicked_is_inconclusive(self):
        assert classify_database(ClickPattern((True, True, True))) is None

    def test_count_matches_classify(self):
        patterns = np.array(
            [[1, 0, 1], [0, 0, 1], [1, 1, 1], [1, 1, 0], [1, 0, 1]], dtype=bool
        )
        identified, inconclusive = count_database_outcomes(patterns)
        assert list(identified) == [0, 2, 1]
        assert inconclusive == 2


class TestSpecValidation:
    def test_priors_must_sum(self):
        with pytest.raises(ValueError):
            DatabaseSpec((1.0, 2.0), (0.7, 0.7), 1)

    def test_true_index_range(self):
        with pytest.raises(ValueError):
            DatabaseSpec((1.0, 2.0), (0.5, 0.5), 3)

    def test_near_coincident_references_warn(self):
        with pytest.warns(UserWarning):
            DatabaseSpec((1.0, 1.0 + 1e-12), (0.5, 0.5), 1)

    def test_ring_layout(self):
        spec = DatabaseSpec.ring(2.0, 4)
        assert spec.n_refs == 4
        assert all(abs(abs(r) - 2.0) <= 1e-12 for r in spec.references)


class TestProbabilities:
    def test_coincident_pair_contributes_nothing(self):
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            spec = DatabaseSpec((1.0, 1.0, -1.0), (1 / 3, 1 / 3, 1 / 3), 1)
        # Whenever the probe matches either duplicate, the other duplicate's
        # detector is also silent, so those terms vanish.
        duplicate_free = DatabaseSpec((1.0, -1.0), (0.5, 0.5), 1)
        assert success_probability(spec) < success_probability(duplicate_free)

    def test_ring_zero_radius(self):
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            assert ring_probability(0.0, 3) == 0.0

    def test_ring_two_references_closed_form(self):
        alpha = 0.9
        expected = 1.0 - math.exp(-4.0 * alpha**2 / 3.0)
        assert ring_probability(alpha, 2) == pytest.approx(expected, abs=1e-15)

    @pytest.mark.parametrize("n, alpha", [(3, 0.8), (4, 3.0), (5, 1.2)])
    def test_ring_matches_explicit_spec(self, n, alpha):
        analytic = ring_probability(alpha, n)
        explicit = success_probability(DatabaseSpec.ring(alpha, n))
        assert abs(analytic - explicit) <= 1e-14

    def test_exponent_constants_disagree(self):
        # The printed closed-form constant is inconsistent with the circuit;
        # both are exposed so reports can show them side by side.
        for n in (2, 3, 4):
            assert circuit_exponent_constant(n) != published_exponent_constant(n)
        assert circuit_exponent_constant(2) == pytest.approx(1 / 3)
        assert published_exponent_constant(2) == pytest.approx(1.0)

    def test_published_variant_on_ring_matches_published_ring_formula(self):
        from coherentid.database import published_success_probability

        spec = DatabaseSpec.ring(1.4, 4)
        via_spec = published_success_probability(spec)
        via_ring = ring_probability(1.4, 4, exponent_constant=published_exponent_constant(4))
        assert via_spec == pytest.approx(via_ring, abs=1e-14)
        assert via_spec != pytest.approx(success_probability(spec), abs=1e-3)


class TestMonteCarlo:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_matches_analytic_within_4_sigma(self, n):
        spec = DatabaseSpec.ring(1.0, n, true_index=1)
        shots = 20_000
        summary = run_database_mc(spec, shots, seed=31 + n)
        p = summary.p_conditional_true
        sigma = math.sqrt(p * (1 - p) / shots)
        assert summary.misidentifications == 0
        assert abs(summary.success_frequency - p) <= 4 * sigma

    def test_conditional_probability_equals_prior_weighted_total(self):
        # For a symmetric ring every conditional term is identical, so the
        # prior-weighted total equals the per-truth conditional.
        spec = DatabaseSpec.ring(1.3, 3)
        summary = run_database_mc(spec, 10, seed=1)
        assert summary.p_conditional_true == pytest.approx(
            summary.p_analytic_circuit, abs=1e-14
        )

    def test_zero_shots(self):
        spec = DatabaseSpec.ring(1.0, 2)
        summary = run_database_mc(spec, 0, seed=1)
        assert summary.success_frequency == 0.0
        assert summary.inconclusive == 0
