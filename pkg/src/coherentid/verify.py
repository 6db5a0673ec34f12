"""Certification batteries aggregating the package's numerical invariants.

Each check returns a residual and the tolerance it must stay under; the
batteries power the `verify` CLI subcommand and the acceptance tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import database, fock, povm
from .rng import substream
from .strategies import Priors


@dataclass(frozen=True)
class CheckResult:
    check: str
    params: dict
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "params": self.params,
            "residual": float(self.residual),
            "tolerance": float(self.tolerance),
            "pass": self.passed,
        }


def _block_eigenvalue_residual(n_pairs: int, seed: int) -> float:
    gen = substream(seed, 0)
    worst = 0.0
    for _ in range(n_pairs):
        c1, c2 = gen.random(2)
        closed = povm.e0_block_eigenvalues(c1, c2)
        num3 = np.sort(np.linalg.eigvalsh(povm.q3_block(c1, c2)))[::-1]
        num6 = np.sort(np.linalg.eigvalsh(povm.q6_block(c1, c2)))[::-1]
        worst = max(
            worst,
            float(np.max(np.abs(num3 - np.asarray(closed.lambda3)))),
            float(np.max(np.abs(num6 - np.asarray(closed.lambda6)))),
        )
    return worst


def _sb_boundary_mismatches(d: int, grid_points: int = 21, tol: float = 1e-10) -> int:
    mismatches = 0
    for c1 in np.linspace(0.0, 1.0, grid_points):
        for c2 in np.linspace(0.0, 1.0, grid_points):
            report = povm.certify_povm(povm.build_sb_povm(d, c1, c2), tol=tol)
            should_pass = c1 + c2 <= 1.0 + tol
            if report.passed != should_pass:
                mismatches += 1
    return mismatches


def _hayashi_law_residual(d: int, n_pairs: int, seed: int) -> float:
    measurement = povm.build_hayashi_povm(d)
    psi1s, psi2s = povm.haar_pairs(d, n_pairs, seed)
    worst = 0.0
    for psi1, psi2 in zip(psi1s, psi2s):
        got = povm.identification_prob(measurement, psi1, psi2, Priors.equal())
        overlap_sq = abs(np.vdot(psi1, psi2)) ** 2
        worst = max(worst, abs(got - (1.0 - overlap_sq) / 3.0))
    return worst


def qudit_battery(d: int, seed: int = 20240901) -> list[CheckResult]:
    """Certification battery for the finite-dimensional constructions."""
    results = []
    results.append(
        CheckResult(
            "appendix-block-eigenvalues",
            {"pairs": 50, "seed": seed},
            _block_eigenvalue_residual(50, seed),
            1e-12,
        )
    )
    if d >= 3:
        results.append(
            CheckResult(
                "sb-positivity-boundary",
                {"d": d, "grid": "21x21"},
                float(_sb_boundary_mismatches(d)),
                0.0,
            )
        )
    else:
        # For qubits there is no fully mixed-index block, so weights past the
        # qudit boundary can still be positive.
        report = povm.certify_povm(povm.build_sb_povm(2, 0.6, 0.6))
        results.append(
            CheckResult(
                "sb-qubit-above-boundary-positive",
                {"d": 2, "c1": 0.6, "c2": 0.6},
                0.0 if report.passed else 1.0,
                0.0,
            )
        )

    sb_report = povm.certify_povm(povm.build_sb_povm(d, 0.5, 0.5))
    results.append(
        CheckResult(
            "sb-certify",
            {"d": d, "c1": 0.5, "c2": 0.5},
            max(sb_report.completeness, -sb_report.min_eigenvalue, sb_report.max_hermiticity),
            1e-10,
        )
    )

    hayashi = povm.build_hayashi_povm(d)
    hay_report = povm.certify_povm(hayashi)
    results.append(
        CheckResult(
            "hayashi-certify",
            {"d": d},
            max(hay_report.completeness, -hay_report.min_eigenvalue, hay_report.max_hermiticity),
            1e-10,
        )
    )
    results.append(
        CheckResult(
            "hayashi-probability-law",
            {"d": d, "pairs": 200, "seed": seed + 1},
            _hayashi_law_residual(d, 200, seed + 1),
            1e-10,
        )
    )
    results.append(
        CheckResult(
            "no-error-sb",
            {"d": d, "samples": 500, "seed": seed + 2},
            povm.no_error_check(povm.build_sb_povm(d, 0.5, 0.5), 500, seed + 2),
            1e-10,
        )
    )
    results.append(
        CheckResult(
            "no-error-hayashi",
            {"d": d, "samples": 500, "seed": seed + 3},
            povm.no_error_check(hayashi, 500, seed + 3),
            1e-10,
        )
    )

    overlap = povm.mean_overlap_sq_mc(d, 100_000, seed + 4)
    results.append(
        CheckResult(
            "haar-overlap-mean",
            {"d": d, "samples": overlap.n_samples, "expected": 1.0 / d},
            abs(overlap.mean - 1.0 / d),
            0.005,
        )
    )

    if d == 2:
        eq = povm.equatorial_analysis()
        results.append(
            CheckResult(
                "equatorial-kernel",
                {"vectors": 4},
                eq.max_kernel_residual,
                1e-12,
            )
        )
        results.append(
            CheckResult(
                "equatorial-equals-universal",
                {"eta1": 0.5},
                eq.max_difference_vs_universal,
                1e-10,
            )
        )
        mix = povm.mixing_strategy_povm(0.5, 3)
        sb = povm.build_sb_povm(3, 0.5, 0.5)
        diff = max(
            float(np.max(np.abs(a - b)))
            for a, b in zip(mix.elements, sb.elements)
        )
        results.append(
            CheckResult("mixing-equals-sb", {"q": 0.5, "d": 3}, diff, 1e-12)
        )
    return results


def fock_battery(n_max: int) -> list[CheckResult]:
    """Verification battery for the truncated number-space constructions."""
    results = []
    size = n_max + 1

    chis = np.stack([fock.chi_vector(n, n_max).coeffs for n in range(size)])
    gram = chis.conj() @ chis.T
    results.append(
        CheckResult(
            "chi-gram",
            {"n_max": n_max},
            float(np.max(np.abs(gram - np.eye(size)))),
            1e-14,
        )
    )

    delta = fock.delta_operator(n_max).entries
    projector = delta * (2.0 / math.pi)
    results.append(
        CheckResult(
            "delta-idempotent",
            {"n_max": n_max},
            float(np.max(np.abs(projector @ projector - projector))),
            1e-12,
        )
    )
    results.append(
        CheckResult(
            "delta-trace",
            {"n_max": n_max, "expected_rank": size},
            abs(float(np.real(np.trace(projector))) - size),
            1e-10,
        )
    )

    quad_cutoff = min(n_max, 6)
    quad = fock.delta_quadrature(quad_cutoff).entries
    built = fock.delta_operator(quad_cutoff).entries
    mask = fock.interior_sector_mask(quad_cutoff)
    results.append(
        CheckResult(
            "delta-quadrature",
            {"n_max": quad_cutoff, "r_max": 6.0, "nodes": "400x256"},
            float(np.max(np.abs((quad - built)[np.ix_(mask, mask)]))),
            1e-6,
        )
    )

    unitary = fock.beamsplitter_fock(0.5, n_max).entries
    worst = 0.0
    for n in range(size):
        basis_vec = np.zeros(size * size)
        basis_vec[n * size] = 1.0
        worst = max(
            worst,
            float(np.max(np.abs(unitary.T @ basis_vec - fock.chi_vector(n, n_max).coeffs))),
        )
    results.append(
        CheckResult("splitter-maps-number-states", {"n_max": n_max}, worst, 1e-12)
    )

    totals = fock.total_photon_numbers(n_max)
    cross = np.abs(unitary)[~np.equal.outer(totals, totals)]
    results.append(
        CheckResult(
            "splitter-sector-structure",
            {"n_max": n_max},
            float(np.max(cross)) if cross.size else 0.0,
            1e-14,
        )
    )

    mask = fock.interior_sector_mask(n_max)
    interior = unitary[np.ix_(mask, mask)]
    results.append(
        CheckResult(
            "splitter-unitarity-interior",
            {"n_max": n_max},
            float(np.max(np.abs(interior.T @ interior - np.eye(int(mask.sum()))))),
            1e-12,
        )
    )

    pi0, pi1 = fock.comparator_povm_opt(n_max)
    laws = max(
        float(np.max(np.abs(pi0.entries @ pi0.entries - pi0.entries))),
        float(np.max(np.abs(pi0.entries @ pi1.entries))),
        float(np.max(np.abs(pi0.entries - pi0.entries.conj().T))),
    )
    results.append(CheckResult("comparator-projector-laws", {"n_max": n_max}, laws, 1e-12))

    worst = 0.0
    for alpha in (0.0, 1.0, 1.0 + 1.0j):
        cutoff = fock.safe_cutoff(alpha)
        _, pi1_safe = fock.comparator_povm_opt(cutoff)
        state = fock.two_mode_product(
            fock.coherent_fock(alpha, cutoff), fock.coherent_fock(alpha, cutoff)
        )
        worst = max(worst, abs(fock.operator_expectation(pi1_safe, state)))
    results.append(
        CheckResult(
            "comparator-no-error",
            {"alphas": "0, 1, 1+1j", "cutoff_policy": "safe_cutoff"},
            worst,
            1e-10,
        )
    )

    worst = 0.0
    for alpha, beta in ((1.0, 0.0), (1.0, -1.0), (0.5 + 0.5j, -0.25)):
        cutoff = fock.safe_cutoff(alpha, beta)
        _, pi1_safe = fock.comparator_povm_opt(cutoff)
        state = fock.two_mode_product(
            fock.coherent_fock(alpha, cutoff), fock.coherent_fock(beta, cutoff)
        )
        expected = 1.0 - math.exp(-abs(alpha - beta) ** 2 / 2.0)
        worst = max(worst, abs(fock.operator_expectation(pi1_safe, state) - expected))
    results.append(
        CheckResult(
            "comparator-reveal-probability",
            {"pairs": 3, "cutoff_policy": "safe_cutoff"},
            worst,
            1e-8,
        )
    )

    results.append(
        CheckResult(
            "splitter-equals-optimal-comparator",
            {"n_max": n_max},
            fock.verify_bs_equals_opt(n_max),
            1e-11,
        )
    )
    return results


def database_battery(seed: int = 20240902) -> list[CheckResult]:
    """Static consistency checks of the N-reference construction."""
    results = []
    worst = 0.0
    for n in (2, 3, 4, 5):
        spec = database.DatabaseSpec.ring(1.3, n)
        for j in range(1, n + 1):
            amps = database.monitored_amplitudes(spec, spec.references[j - 1])
            expected = np.array(
                [
                    (ref - spec.references[j - 1]) / math.sqrt(n + 1.0)
                    for ref in spec.references
                ]
            )
            worst = max(worst, float(np.max(np.abs(np.abs(amps) - np.abs(expected)))))
    results.append(
        CheckResult("comparator-amplitudes", {"n": "2..5"}, worst, 1e-14)
    )

    worst = 0.0
    for n in (2, 3, 4):
        analytic = database.ring_probability(1.1, n)
        explicit = database.success_probability(database.DatabaseSpec.ring(1.1, n))
        worst = max(worst, abs(analytic - explicit))
    results.append(
        CheckResult("ring-closed-form", {"n": "2..4", "alpha": 1.1}, worst, 1e-14)
    )
    return results
