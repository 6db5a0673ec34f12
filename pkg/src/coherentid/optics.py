"""Exact simulation of coherent states in beamsplitter networks.

A product of coherent states stays a product of coherent states under
passive two-mode mixing, so circuits are propagated by closed-form
arithmetic on one complex amplitude per mode; nothing is truncated.
Detection is an ideal threshold click (at least one photon, unit
efficiency, no dark counts).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np

from .rng import SubstreamSampler, substream


class ModeIndexError(IndexError):
    """A beamsplitter or detector references a mode outside the register."""


class ImpossibleClickError(RuntimeError):
    """A click pattern occurred that the circuit guarantees cannot happen."""


@dataclass(frozen=True)
class BeamsplitterOp:
    """Two-mode mixing element; reflectivity is always derived as 1 - T."""

    mode_a: int
    mode_b: int
    transmittivity: float

    def __post_init__(self):
        if self.mode_a == self.mode_b:
            raise ValueError("beamsplitter needs two distinct modes")
        if not 0.0 <= self.transmittivity <= 1.0:
            raise ValueError(f"transmittivity {self.transmittivity!r} outside [0, 1]")

    @property
    def reflectivity(self) -> float:
        return 1.0 - self.transmittivity


@dataclass(frozen=True)
class CoherentRegister:
    """One complex amplitude per mode."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.atleast_1d(np.asarray(self.amplitudes, dtype=complex))
        if amps.ndim != 1 or amps.size < 1:
            raise ValueError("register needs at least one mode amplitude")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_modes(self) -> int:
        return int(self.amplitudes.size)

    def energy(self) -> float:
        """Total mean photon number over all modes."""
        return float(np.sum(np.abs(self.amplitudes) ** 2))


@dataclass(frozen=True)
class Circuit:
    """Ordered beamsplitter list plus the modes watched by detectors."""

    n_modes: int
    ops: tuple[BeamsplitterOp, ...]
    monitored_modes: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        object.__setattr__(self, "monitored_modes", tuple(self.monitored_modes))
        for op in self.ops:
            if not (0 <= op.mode_a < self.n_modes and 0 <= op.mode_b < self.n_modes):
                raise ModeIndexError(
                    f"op on modes ({op.mode_a}, {op.mode_b}) outside register of {self.n_modes}"
                )
        if len(set(self.monitored_modes)) != len(self.monitored_modes):
            raise ValueError("monitored modes must be distinct")
        for mode in self.monitored_modes:
            if not 0 <= mode < self.n_modes:
                raise ModeIndexError(f"monitored mode {mode} outside register")

    @property
    def n_detectors(self) -> int:
        return len(self.monitored_modes)


@dataclass(frozen=True)
class ClickPattern:
    """Boolean click outcome per monitored mode, in monitored-mode order."""

    clicks: tuple[bool, ...]


@dataclass(frozen=True)
class OutcomeRecord:
    """Per-shot click pattern with its classification and RNG provenance."""

    seed: int
    shot: int
    clicks: tuple[bool, ...]
    outcome: str


def apply_beamsplitter(register: CoherentRegister, op: BeamsplitterOp) -> CoherentRegister:
    """Mix one mode pair: (a, b) -> (sqrt(T) a + sqrt(R) b, -sqrt(R) a + sqrt(T) b)."""
    if not (0 <= op.mode_a < register.n_modes and 0 <= op.mode_b < register.n_modes):
        raise ModeIndexError(
            f"op on modes ({op.mode_a}, {op.mode_b}) outside register of {register.n_modes}"
        )
    sqrt_t = math.sqrt(op.transmittivity)
    sqrt_r = math.sqrt(op.reflectivity)
    amps = register.amplitudes.copy()
    a, b = amps[op.mode_a], amps[op.mode_b]
    amps[op.mode_a] = sqrt_t * a + sqrt_r * b
    amps[op.mode_b] = -sqrt_r * a + sqrt_t * b
    return CoherentRegister(amps)


def run_circuit(circuit: Circuit, register: CoherentRegister) -> CoherentRegister:
    """Fold every beamsplitter over the register, in circuit order."""
    if register.n_modes != circuit.n_modes:
        raise ValueError(
            f"register has {register.n_modes} modes, circuit expects {circuit.n_modes}"
        )
    out = register
    for op in circuit.ops:
        out = apply_beamsplitter(out, op)
    return out


def no_click_probability(amplitude: complex) -> float:
    """Vacuum overlap exp(-|amplitude|^2): the chance an ideal detector stays silent."""
    return math.exp(-abs(amplitude) ** 2)


def coherent_overlap_sq(a: complex, b: complex) -> float:
    """Squared overlap of two coherent states, exp(-|a - b|^2)."""
    return math.exp(-abs(a - b) ** 2)


def click_probabilities(output: CoherentRegister, circuit: Circuit) -> np.ndarray:
    """Per-detector click probability 1 - exp(-|amplitude|^2)."""
    amps = output.amplitudes[list(circuit.monitored_modes)]
    return -np.expm1(-np.abs(amps) ** 2)


def sample_clicks(
    output: CoherentRegister, circuit: Circuit, seed: int, shot: int
) -> ClickPattern:
    """One independent Bernoulli draw per detector, deterministic in (seed, shot)."""
    probs = click_probabilities(output, circuit)
    uniforms = substream(seed, shot).random(probs.size)
    return ClickPattern(tuple(bool(u < p) for u, p in zip(uniforms, probs)))


def sample_click_patterns(
    output: CoherentRegister,
    circuit: Circuit,
    seed: int,
    n_shots: int,
    start_shot: int = 0,
) -> np.ndarray:
    """Boolean array of shape (n_shots, n_detectors).

    Row ``i`` equals ``sample_clicks(output, circuit, seed, start_shot + i)``;
    the batch only exists to amortize generator setup.
    """
    probs = click_probabilities(output, circuit)
    patterns = np.empty((n_shots, probs.size), dtype=bool)
    sampler = SubstreamSampler(seed)
    for i in range(n_shots):
        uniforms = sampler.generator(start_shot + i).random(probs.size)
        patterns[i] = uniforms < probs
    return patterns


# --- two-reference identification circuit -----------------------------------
#
# Mode layout: 0 = vacuum ancilla, 1 = unknown probe, 2 = first reference,
# 3 = second reference.  The first splitter clones the probe, the other two
# each compare one clone against one reference, steering any mismatch energy
# onto a monitored mode.

UI2_ANCILLA, UI2_PROBE, UI2_REF1, UI2_REF2 = 0, 1, 2, 3


def ui2_transmittivities(t1: float) -> tuple[float, float, float]:
    """Splitter settings that make each matched reference yield an exact vacuum."""
    if not 0.0 < t1 < 1.0:
        raise ValueError(f"t1 must lie strictly inside (0, 1), got {t1!r}")
    return t1, 1.0 / (1.0 + t1), (1.0 - t1) / (2.0 - t1)


def build_ui2_circuit(t1: float) -> Circuit:
    """Three-beamsplitter circuit identifying a probe against two references.

    The detector on the probe mode fires only when the probe matches
    reference 2; the detector on the reference-2 mode fires only when it
    matches reference 1.  Whichever detector stays compatible with vacuum
    is inconclusive.
    """
    t1, t2, t3 = ui2_transmittivities(t1)
    ops = (
        BeamsplitterOp(UI2_ANCILLA, UI2_PROBE, t1),
        BeamsplitterOp(UI2_REF1, UI2_PROBE, t2),
        BeamsplitterOp(UI2_ANCILLA, UI2_REF2, t3),
    )
    return Circuit(n_modes=4, ops=ops, monitored_modes=(UI2_PROBE, UI2_REF2))


def ui2_input(alpha_probe: complex, alpha1: complex, alpha2: complex) -> CoherentRegister:
    """Input register for the two-reference circuit."""
    return CoherentRegister(np.array([0.0, alpha_probe, alpha1, alpha2], dtype=complex))


def classify_ui2(pattern: ClickPattern) -> int | None:
    """Verdict for a two-detector pattern: matched reference 1, 2, or None.

    A double click is excluded on promised inputs (one output mode is an
    exact vacuum) and therefore raises ImpossibleClickError.
    """
    if len(pattern.clicks) != 2:
        raise ValueError("two-reference classification needs exactly two detectors")
    probe_clicked, ref2_clicked = pattern.clicks
    if probe_clicked and ref2_clicked:
        raise ImpossibleClickError(
            "both detectors clicked, but one output mode is guaranteed vacuum"
        )
    if ref2_clicked:
        return 1
    if probe_clicked:
        return 2
    return None


def count_ui2_outcomes(patterns: np.ndarray) -> dict[str, int]:
    """Tally classify_ui2 over a (n_shots, 2) boolean array without raising."""
    probe = patterns[:, 0]
    ref2 = patterns[:, 1]
    return {
        "identified_1": int(np.sum(ref2 & ~probe)),
        "identified_2": int(np.sum(probe & ~ref2)),
        "inconclusive": int(np.sum(~probe & ~ref2)),
        "error": int(np.sum(probe & ref2)),
    }


def outcome_label(identified: int | None) -> str:
    return "inconclusive" if identified is None else f"identified_{identified}"


# --- serialization -----------------------------------------------------------


def circuit_to_json(circuit: Circuit) -> str:
    payload = {
        "n_modes": circuit.n_modes,
        "ops": [
            {"a": op.mode_a, "b": op.mode_b, "t": op.transmittivity} for op in circuit.ops
        ],
        "monitored": list(circuit.monitored_modes),
    }
    return json.dumps(payload, sort_keys=True)


def circuit_from_json(text: str) -> Circuit:
    payload = json.loads(text)
    ops = tuple(
        BeamsplitterOp(entry["a"], entry["b"], entry["t"]) for entry in payload["ops"]
    )
    return Circuit(payload["n_modes"], ops, tuple(payload["monitored"]))


def records_to_csv(records: Iterable[OutcomeRecord], stream: TextIO) -> None:
    """Write shot records as CSV rows (seed, shot, clicks..., outcome)."""
    records = list(records)
    n_detectors = len(records[0].clicks) if records else 0
    writer = csv.writer(stream)
    writer.writerow(
        ["seed", "shot"] + [f"click_{i}" for i in range(n_detectors)] + ["outcome"]
    )
    for rec in records:
        writer.writerow(
            [rec.seed, rec.shot] + [int(c) for c in rec.clicks] + [rec.outcome]
        )
