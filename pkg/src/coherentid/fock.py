"""Photon-number-space checks of the single-splitter comparator.

Everything here lives on a truncated one- or two-mode number basis with a
per-mode cutoff.  Two-mode vectors and operators are stored flat in kron
ordering: index a * (n_max + 1) + b for |a> x |b>.  Coherent vectors are
never renormalized; the lost norm is tracked as tail mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb, factorial

import numpy as np


class CutoffError(ValueError):
    """Requested construction does not fit under the photon-number cutoff."""


@dataclass(frozen=True)
class FockVector:
    n_max: int
    modes: int
    coeffs: np.ndarray
    tail_mass: float

    def __post_init__(self):
        expected = (self.n_max + 1) ** self.modes
        if self.coeffs.size != expected:
            raise ValueError(f"expected {expected} coefficients, got {self.coeffs.size}")
        if self.tail_mass < -1e-14:
            raise ValueError(f"negative tail mass {self.tail_mass}")

    def norm_sq(self) -> float:
        return float(np.real(np.vdot(self.coeffs, self.coeffs)))


@dataclass(frozen=True)
class FockOperator:
    n_max: int
    modes: int
    entries: np.ndarray

    def __post_init__(self):
        dim = (self.n_max + 1) ** self.modes
        if self.entries.shape != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} matrix, got {self.entries.shape}")


def safe_cutoff(*alphas: complex, floor: int = 20) -> int:
    """Cutoff policy |alpha|^2 + 8 |alpha| + floor, over all supplied amplitudes."""
    worst = 0.0
    for alpha in alphas:
        mag = abs(alpha)
        worst = max(worst, mag * mag + 8.0 * mag)
    return int(math.ceil(worst)) + floor


def coherent_fock(alpha: complex, n_max: int) -> FockVector:
    """Number-basis expansion of a coherent state, truncated but not renormalized."""
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    coeffs = np.zeros(n_max + 1, dtype=complex)
    coeffs[0] = math.exp(-abs(alpha) ** 2 / 2.0)
    for k in range(1, n_max + 1):
        coeffs[k] = coeffs[k - 1] * alpha / math.sqrt(k)
    tail = max(0.0, 1.0 - float(np.real(np.vdot(coeffs, coeffs))))
    return FockVector(n_max, 1, coeffs, tail)


def two_mode_product(v1: FockVector, v2: FockVector) -> FockVector:
    """Product state of two single-mode vectors, in kron ordering."""
    if v1.modes != 1 or v2.modes != 1 or v1.n_max != v2.n_max:
        raise ValueError("two_mode_product needs single-mode vectors with equal cutoff")
    captured = (1.0 - v1.tail_mass) * (1.0 - v2.tail_mass)
    return FockVector(v1.n_max, 2, np.kron(v1.coeffs, v2.coeffs), 1.0 - captured)


def chi_vector(n_photons: int, n_max: int) -> FockVector:
    """Binomial two-mode unit vector on the fixed-total-photon sector.

    This is the image of |N> x |0> under the balanced splitter; the family
    over all N is orthonormal and spans the states the comparator cannot
    distinguish from identical inputs.
    """
    if n_photons > n_max:
        raise CutoffError(f"sector {n_photons} exceeds cutoff {n_max}")
    size = n_max + 1
    coeffs = np.zeros(size * size, dtype=complex)
    scale = 2.0 ** (-n_photons / 2.0)
    for k in range(n_photons + 1):
        coeffs[k * size + (n_photons - k)] = scale * math.sqrt(comb(n_photons, k))
    return FockVector(n_max, 2, coeffs, 0.0)


def total_photon_numbers(n_max: int) -> np.ndarray:
    """Total photon count for each flat two-mode basis index."""
    counts = np.arange(n_max + 1)
    return np.add.outer(counts, counts).reshape(-1)


def interior_sector_mask(n_max: int) -> np.ndarray:
    """Flat-index mask of the sectors fully contained under the cutoff."""
    return total_photon_numbers(n_max) <= n_max


def delta_operator(n_max: int) -> FockOperator:
    """(pi / 2) times the projector onto the span of the binomial vectors.

    Equals the integral of |alpha, alpha><alpha, alpha| over the complex
    plane, restricted to sectors under the cutoff; delta_quadrature
    evaluates that integral directly as an independent cross-check.
    """
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    dim = (n_max + 1) ** 2
    entries = np.zeros((dim, dim), dtype=complex)
    for n in range(n_max + 1):
        chi = chi_vector(n, n_max).coeffs
        entries += np.outer(chi, chi.conj())
    return FockOperator(n_max, 2, (math.pi / 2.0) * entries)


def delta_quadrature(
    n_max: int, r_max: float = 6.0, n_radial: int = 400, n_angular: int = 256
) -> FockOperator:
    """Brute-force polar quadrature of the defining pair-state integral.

    Gauss-Legendre nodes in the radius (with the r dr Jacobian), a uniform
    midpoint rule in the angle (exact for every harmonic the truncated
    integrand contains), measure d(Re alpha) d(Im alpha).
    """
    nodes, weights = np.polynomial.legendre.leggauss(n_radial)
    radii = 0.5 * r_max * (nodes + 1.0)
    w_rad = 0.5 * r_max * weights * radii
    angles = 2.0 * np.pi * (np.arange(n_angular) + 0.5) / n_angular
    w_ang = 2.0 * np.pi / n_angular

    alphas = (radii[:, None] * np.exp(1j * angles)[None, :]).reshape(-1)
    node_weights = (w_rad[:, None] * np.full(n_angular, w_ang)[None, :]).reshape(-1)

    size = n_max + 1
    single = np.zeros((size, alphas.size), dtype=complex)
    single[0] = np.exp(-np.abs(alphas) ** 2 / 2.0)
    for k in range(1, size):
        single[k] = single[k - 1] * alphas / math.sqrt(k)
    pair = (single[:, None, :] * single[None, :, :]).reshape(size * size, -1)
    entries = (pair * node_weights) @ pair.conj().T
    return FockOperator(n_max, 2, entries)


def beamsplitter_fock(transmittivity: float, n_max: int) -> FockOperator:
    """Two-mode splitter unitary on the truncated number basis.

    Built sector by sector from binomial expansions of the transformed
    creation operators, so blocks with total photon number <= n_max are
    exactly unitary and no amplitude leaks between sectors.  Sectors that
    the per-mode cutoff truncates carry the restriction of the full
    unitary (sub-unitary rows).  The amplitude convention matches the
    coherent-state map (a, b) -> (sqrt(T) a + sqrt(R) b, -sqrt(R) a + sqrt(T) b).
    """
    if not 0.0 <= transmittivity <= 1.0:
        raise ValueError(f"transmittivity {transmittivity!r} outside [0, 1]")
    reflectivity = 1.0 - transmittivity
    size = n_max + 1
    entries = np.zeros((size * size, size * size))
    for total in range(2 * n_max + 1):
        k_lo, k_hi = max(0, total - n_max), min(total, n_max)
        for k in range(k_lo, k_hi + 1):
            # (sqrt(T) a+ - sqrt(R) b+)^k (sqrt(R) a+ + sqrt(T) b+)^(total-k) |0,0>
            poly_a = np.array(
                [
                    comb(k, p)
                    * transmittivity ** (p / 2.0)
                    * (-1.0) ** (k - p)
                    * reflectivity ** ((k - p) / 2.0)
                    for p in range(k + 1)
                ]
            )
            poly_b = np.array(
                [
                    comb(total - k, q)
                    * reflectivity ** (q / 2.0)
                    * transmittivity ** ((total - k - q) / 2.0)
                    for q in range(total - k + 1)
                ]
            )
            monomials = np.convolve(poly_a, poly_b)
            col = k * size + (total - k)
            in_norm = factorial(k) * factorial(total - k)
            for m in range(k_lo, k_hi + 1):
                # Exact integer ratio; its square root is correctly rounded.
                norm = math.sqrt(factorial(m) * factorial(total - m) / in_norm)
                entries[m * size + (total - m), col] = monomials[m] * norm
    return FockOperator(n_max, 2, entries)


def comparator_povm_opt(n_max: int) -> tuple[FockOperator, FockOperator]:
    """Two-outcome comparison measurement: (inconclusive, states-differ).

    The inconclusive element projects onto the span of the binomial
    vectors, which carries every identical-input pair; its complement can
    only fire on genuinely different inputs.
    """
    delta = delta_operator(n_max)
    pi0 = delta.entries * (2.0 / math.pi)
    pi1 = np.eye(pi0.shape[0]) - pi0
    return FockOperator(n_max, 2, pi0), FockOperator(n_max, 2, pi1)


def operator_expectation(op: FockOperator, vec: FockVector) -> float:
    if op.modes != vec.modes or op.n_max != vec.n_max:
        raise ValueError("operator and vector live on different spaces")
    return float(np.real(np.vdot(vec.coeffs, op.entries @ vec.coeffs)))


def vector_overlap(u: FockVector, v: FockVector) -> complex:
    if u.modes != v.modes or u.n_max != v.n_max:
        raise ValueError("vectors live on different spaces")
    return complex(np.vdot(u.coeffs, v.coeffs))


def verify_bs_equals_opt(n_max: int, transmittivity: float = 0.5) -> float:
    """Max entry deviation between the splitter-implemented comparator and the
    optimal one, over the sectors fully inside the cutoff.

    With the balanced setting (the default) the deviation is numerical
    noise; any other transmittivity implements a different measurement and
    produces a macroscopic deviation.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    size = n_max + 1
    unitary = beamsplitter_fock(transmittivity, n_max).entries
    # Projector onto "second mode in vacuum", diagonal in the number basis.
    detector = np.zeros((size * size, size * size))
    for k in range(size):
        detector[k * size, k * size] = 1.0
    pi0_setup = unitary.T @ detector @ unitary
    pi0_opt = comparator_povm_opt(n_max)[0].entries
    mask = interior_sector_mask(n_max)
    diff = pi0_setup[np.ix_(mask, mask)] - pi0_opt[np.ix_(mask, mask)]
    return float(np.max(np.abs(diff)))
