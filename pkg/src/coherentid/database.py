"""Identification among N unknown coherent references with 2N - 1 splitters.

A distribution stage splits the probe into N equal-amplitude copies, then
one comparator splitter per reference routes the mismatch energy
(alpha_k - alpha_?) / sqrt(N + 1) onto that reference's detector.  On a
promised input exactly one detector mode is vacuum, so a pattern with a
single silent detector names the match unambiguously.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .optics import (
    BeamsplitterOp,
    Circuit,
    CoherentRegister,
    click_probabilities,
    ClickPattern,
    run_circuit,
    sample_click_patterns,
)

DISTRIBUTE = "distribute"
COMPARE = "compare"


@dataclass(frozen=True)
class ScheduleEntry:
    stage: str
    j: int
    transmittivity: float

    def __post_init__(self):
        if self.stage not in (DISTRIBUTE, COMPARE):
            raise ValueError(f"unknown stage {self.stage!r}")
        if not 0.0 < self.transmittivity < 1.0:
            raise ValueError(f"transmittivity {self.transmittivity!r} outside (0, 1)")


@dataclass(frozen=True)
class DatabaseSpec:
    """References, priors, and the identity of the probe state."""

    references: tuple[complex, ...]
    priors: tuple[float, ...]
    true_index: int

    def __post_init__(self):
        refs = tuple(complex(a) for a in self.references)
        priors = tuple(float(p) for p in self.priors)
        object.__setattr__(self, "references", refs)
        object.__setattr__(self, "priors", priors)
        if len(refs) < 2:
            raise ValueError("need at least two references")
        if len(priors) != len(refs):
            raise ValueError("one prior per reference required")
        if any(p < 0 for p in priors) or abs(sum(priors) - 1.0) > 1e-9:
            raise ValueError("priors must be non-negative and sum to 1")
        if not 1 <= self.true_index <= len(refs):
            raise ValueError(f"true_index {self.true_index} outside 1..{len(refs)}")
        for i in range(len(refs)):
            for j in range(i + 1, len(refs)):
                if abs(refs[i] - refs[j]) < 1e-9:
                    warnings.warn(
                        f"references {i + 1} and {j + 1} are closer than 1e-9; "
                        "they cannot be told apart",
                        stacklevel=2,
                    )

    @property
    def n_refs(self) -> int:
        return len(self.references)

    @classmethod
    def ring(cls, alpha_modulus: float, n: int, true_index: int = 1) -> "DatabaseSpec":
        """Equal-prior references equally spaced on a circle of given radius."""
        refs = tuple(
            alpha_modulus * np.exp(2j * math.pi * k / n) for k in range(1, n + 1)
        )
        return cls(refs, (1.0 / n,) * n, true_index)


def distribution_schedule(n: int) -> list[ScheduleEntry]:
    """Transmittivities of the N - 1 splitters copying the probe into N modes."""
    if n < 2:
        raise ValueError(f"need at least two references, got {n}")
    return [
        ScheduleEntry(DISTRIBUTE, j, (n - j) / (n - j + 1.0)) for j in range(1, n)
    ]


def comparator_schedule(n: int) -> list[ScheduleEntry]:
    """Transmittivities of the N comparison splitters (all equal to 1 / (N + 1))."""
    if n < 2:
        raise ValueError(f"need at least two references, got {n}")
    return [ScheduleEntry(COMPARE, k, 1.0 / (n + 1.0)) for k in range(1, n + 1)]


def circuit_exponent_constant(n: int) -> float:
    """Detector exponent factor the circuit actually realizes."""
    return 1.0 / (n + 1.0)


def published_exponent_constant(n: int) -> float:
    """Exponent factor printed in the closed-form source; kept for comparison.

    Inconsistent with the circuit output (and with the two-reference
    special case); reported alongside, never used for predictions.
    """
    return 1.0 / math.sqrt(n - 1.0)


def build_database_circuit(spec: DatabaseSpec) -> Circuit:
    """2N-mode circuit: N - 1 distribution splitters, then N comparators.

    Mode layout: 0 .. N-2 ancillas (vacuum in), N-1 the probe,
    N .. 2N-1 the references.  Ancilla j-1 and finally the probe mode carry
    the N split copies; detector k sits on reference mode k.
    """
    n = spec.n_refs
    probe = n - 1
    ops: list[BeamsplitterOp] = []
    for entry in distribution_schedule(n):
        ops.append(BeamsplitterOp(entry.j - 1, probe, entry.transmittivity))
    split_modes = list(range(n - 1)) + [probe]
    for entry, split in zip(comparator_schedule(n), split_modes):
        ref_mode = n - 1 + entry.j
        ops.append(BeamsplitterOp(split, ref_mode, entry.transmittivity))
    monitored = tuple(range(n, 2 * n))
    return Circuit(n_modes=2 * n, ops=tuple(ops), monitored_modes=monitored)


def database_input(spec: DatabaseSpec, alpha_probe: complex | None = None) -> CoherentRegister:
    """Input register; the probe defaults to the promised reference."""
    n = spec.n_refs
    if alpha_probe is None:
        alpha_probe = spec.references[spec.true_index - 1]
    amps = np.zeros(2 * n, dtype=complex)
    amps[n - 1] = alpha_probe
    amps[n:] = spec.references
    return CoherentRegister(amps)


def monitored_amplitudes(
    spec: DatabaseSpec, alpha_probe: complex | None = None
) -> np.ndarray:
    """Detector-mode output amplitudes, one per reference."""
    circuit = build_database_circuit(spec)
    output = run_circuit(circuit, database_input(spec, alpha_probe))
    return output.amplitudes[list(circuit.monitored_modes)]


def classify_database(pattern: ClickPattern) -> int | None:
    """Identified reference (1-based) when exactly one detector is silent, else None."""
    silent = [i for i, clicked in enumerate(pattern.clicks) if not clicked]
    if len(silent) == 1:
        return silent[0] + 1
    return None


def count_database_outcomes(patterns: np.ndarray) -> tuple[np.ndarray, int]:
    """Vectorized classify_database tally over a (shots, N) boolean array.

    Returns (identified counts per reference, inconclusive count).
    """
    silent = ~patterns
    n_silent = silent.sum(axis=1)
    conclusive = n_silent == 1
    identified = silent[conclusive].sum(axis=0).astype(int)
    return identified, int(np.sum(~conclusive))


def success_probability(spec: DatabaseSpec) -> float:
    """Prior-weighted probability that all but the matching detector click.

    Evaluated from the simulated detector amplitudes, so the exponent
    factor is whatever the circuit realizes, 1 / (N + 1).
    """
    total = 0.0
    for j in range(1, spec.n_refs + 1):
        amps = monitored_amplitudes(spec, spec.references[j - 1])
        product = 1.0
        for k in range(spec.n_refs):
            if k != j - 1:
                product *= -math.expm1(-abs(amps[k]) ** 2)
        total += spec.priors[j - 1] * product
    return total


def published_success_probability(spec: DatabaseSpec) -> float:
    """Closed-form product evaluated with the published exponent constant.

    Kept purely for side-by-side reporting against success_probability;
    the two disagree because the published constant does not match the
    circuit (see published_exponent_constant).
    """
    c = published_exponent_constant(spec.n_refs)
    total = 0.0
    for j in range(spec.n_refs):
        product = 1.0
        for k in range(spec.n_refs):
            if k != j:
                gap_sq = abs(spec.references[k] - spec.references[j]) ** 2
                product *= -math.expm1(-c * gap_sq)
        total += spec.priors[j] * product
    return total


def ring_probability(
    alpha_modulus: float, n: int, exponent_constant: float | None = None
) -> float:
    """Closed-form success probability of the symmetric ring configuration.

    The exponent constant defaults to the circuit-derived 1 / (N + 1);
    pass published_exponent_constant(n) to evaluate the printed variant.
    """
    if n < 2:
        raise ValueError(f"need at least two references, got {n}")
    if alpha_modulus < 0:
        raise ValueError("alpha_modulus must be non-negative")
    c = circuit_exponent_constant(n) if exponent_constant is None else exponent_constant
    product = 1.0
    for k in range(1, n):
        gap_sq = 2.0 * alpha_modulus**2 * (1.0 - math.cos(2.0 * math.pi * k / n))
        product *= -math.expm1(-c * gap_sq)
    return product


@dataclass(frozen=True)
class DatabaseRunSummary:
    n_refs: int
    shots: int
    seed: int
    identified: tuple[int, ...]
    inconclusive: int
    misidentifications: int
    success_frequency: float
    p_analytic_circuit: float
    p_conditional_true: float


def run_database_mc(spec: DatabaseSpec, shots: int, seed: int) -> DatabaseRunSummary:
    """Monte Carlo shots of the full circuit with the promised probe."""
    circuit = build_database_circuit(spec)
    output = run_circuit(circuit, database_input(spec))
    patterns = sample_click_patterns(output, circuit, seed, shots)
    identified, inconclusive = count_database_outcomes(patterns)
    correct = int(identified[spec.true_index - 1])
    wrong = int(identified.sum()) - correct
    probs = click_probabilities(output, circuit)
    conditional = float(
        np.prod([p for k, p in enumerate(probs) if k != spec.true_index - 1])
    )
    return DatabaseRunSummary(
        n_refs=spec.n_refs,
        shots=shots,
        seed=seed,
        identified=tuple(int(c) for c in identified),
        inconclusive=inconclusive,
        misidentifications=wrong,
        success_frequency=correct / shots if shots else 0.0,
        p_analytic_circuit=success_probability(spec),
        p_conditional_true=conditional,
    )
