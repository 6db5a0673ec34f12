"""Finite-dimensional identification POVMs and their numerical certification.

All operators live on the three-system space H_d^(x3) with the fixed
ordering (probe, reference 1, reference 2).  Anything described as acting
on a subsystem pair is lifted to the full space by explicit index
permutation, never by subscript convention.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .rng import substream
from .strategies import Priors

PROBE, REF1, REF2 = 0, 1, 2

# Even/odd permutations of three subsystems, used by the symmetrizers.
_PERMS_3 = {
    (0, 1, 2): 1,
    (1, 2, 0): 1,
    (2, 0, 1): 1,
    (0, 2, 1): -1,
    (2, 1, 0): -1,
    (1, 0, 2): -1,
}


# --- elementary operators and embeddings -------------------------------------


def swap_operator(d: int) -> np.ndarray:
    """Exchange of two d-level systems: SWAP |i>|j> = |j>|i>."""
    if d < 2:
        raise ValueError(f"dimension must be at least 2, got {d}")
    swap = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            swap[j * d + i, i * d + j] = 1.0
    return swap


def antisym_projector_pair(d: int) -> np.ndarray:
    """Projector onto the antisymmetric subspace of a pair, (1 - SWAP) / 2."""
    return (np.eye(d * d) - swap_operator(d)) / 2.0


def permutation_operator(d: int, perm: tuple[int, ...]) -> np.ndarray:
    """Operator rearranging subsystems so output slot k carries input slot perm[k]."""
    n = len(perm)
    dim = d**n
    matrix = np.zeros((dim, dim))
    for idx in itertools.product(range(d), repeat=n):
        src = int(np.ravel_multi_index(idx, (d,) * n))
        dst = int(np.ravel_multi_index(tuple(idx[p] for p in perm), (d,) * n))
        matrix[dst, src] = 1.0
    return matrix


def sym3_projector(d: int) -> np.ndarray:
    """Projector onto the totally symmetric three-system subspace."""
    acc = sum(permutation_operator(d, p) for p in _PERMS_3)
    return acc / 6.0


def antisym3_projector(d: int) -> np.ndarray:
    """Projector onto the totally antisymmetric three-system subspace."""
    acc = sum(sign * permutation_operator(d, p) for p, sign in _PERMS_3.items())
    return acc / 6.0


def embed_pair_operator(
    op: np.ndarray, d: int, sites: tuple[int, int], n_systems: int = 3
) -> np.ndarray:
    """Lift a two-system operator onto `sites` of an n-system space, identity elsewhere."""
    i, j = sites
    if i == j:
        raise ValueError("sites must be distinct")
    others = [s for s in range(n_systems) if s not in (i, j)]
    current = [i, j] + others
    big = op
    for _ in others:
        big = np.kron(big, np.eye(d))
    tensor = big.reshape((d,) * (2 * n_systems))
    axes = [current.index(s) for s in range(n_systems)]
    tensor = tensor.transpose(axes + [n_systems + a for a in axes])
    return np.ascontiguousarray(tensor.reshape(d**n_systems, d**n_systems))


def embed_pair_vector(
    pair_vec: np.ndarray,
    single_vec: np.ndarray,
    d: int,
    sites: tuple[int, int],
    n_systems: int = 3,
) -> np.ndarray:
    """Three-system vector with `pair_vec` on `sites` and `single_vec` on the rest."""
    i, j = sites
    others = [s for s in range(n_systems) if s not in (i, j)]
    current = [i, j] + others
    vec = np.kron(pair_vec, single_vec)
    tensor = vec.reshape((d,) * n_systems)
    axes = [current.index(s) for s in range(n_systems)]
    return np.ascontiguousarray(tensor.transpose(axes).reshape(-1))


def hermiticity_residual(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T)))


def projector_residual(m: np.ndarray) -> float:
    return float(np.max(np.abs(m @ m - m)))


# --- POVM container and certification -----------------------------------------


@dataclass
class DensePOVM:
    """Measurement elements on one Hilbert space, inconclusive element first."""

    elements: list[np.ndarray]
    labels: list[str]

    def __post_init__(self):
        if len(self.elements) != len(self.labels):
            raise ValueError("one label per element required")
        dims = {m.shape for m in self.elements}
        if len(dims) != 1 or any(s[0] != s[1] for s in dims):
            raise ValueError("elements must be square matrices of a common dimension")

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]


@dataclass(frozen=True)
class ElementCheck:
    label: str
    hermiticity: float
    min_eigenvalue: float


@dataclass(frozen=True)
class CertificationReport:
    dim: int
    tol: float
    completeness: float
    elements: tuple[ElementCheck, ...]

    @property
    def min_eigenvalue(self) -> float:
        return min(e.min_eigenvalue for e in self.elements)

    @property
    def max_hermiticity(self) -> float:
        return max(e.hermiticity for e in self.elements)

    @property
    def passed(self) -> bool:
        return (
            self.completeness <= self.tol
            and self.max_hermiticity <= 1e-12
            and self.min_eigenvalue >= -self.tol
        )


def certify_povm(povm: DensePOVM, tol: float = 1e-10) -> CertificationReport:
    """Hermiticity, completeness, and positivity check for every element."""
    total = sum(povm.elements)
    completeness = float(np.max(np.abs(total - np.eye(povm.dim))))
    checks = []
    for label, element in zip(povm.labels, povm.elements):
        herm = hermiticity_residual(element)
        eigenvalues = np.linalg.eigvalsh((element + element.conj().T) / 2.0)
        checks.append(ElementCheck(label, herm, float(eigenvalues[0])))
    return CertificationReport(povm.dim, tol, completeness, tuple(checks))


# --- swap-based construction and its spectrum ---------------------------------


def build_sb_povm(d: int, c1: float, c2: float) -> DensePOVM:
    """Conclusive elements proportional to pair antisymmetrizers.

    Positivity of the inconclusive element is *not* asserted here; run
    certify_povm (it holds iff c1 + c2 <= 1 for d > 2).
    """
    if c1 < 0 or c2 < 0:
        raise ValueError("weights c1, c2 must be non-negative")
    antisym = antisym_projector_pair(d)
    e1 = c1 * embed_pair_operator(antisym, d, (PROBE, REF2))
    e2 = c2 * embed_pair_operator(antisym, d, (PROBE, REF1))
    e0 = np.eye(d**3) - e1 - e2
    return DensePOVM([e0, e1, e2], ["inconclusive", "match-1", "match-2"])


@dataclass(frozen=True)
class BlockEigenvalues:
    """Closed-form spectrum of the inconclusive element's permutation blocks."""

    c1: float
    c2: float
    lambda3: tuple[float, float, float]
    lambda6: tuple[float, float, float, float, float, float]


def e0_block_eigenvalues(c1: float, c2: float) -> BlockEigenvalues:
    if c1 < 0 or c2 < 0:
        raise ValueError("weights c1, c2 must be non-negative")
    root = math.sqrt(c1 * c1 - c1 * c2 + c2 * c2)
    plus = (2.0 - c1 - c2 + root) / 2.0
    minus = (2.0 - c1 - c2 - root) / 2.0
    lambda3 = tuple(sorted((1.0, plus, minus), reverse=True))
    lambda6 = tuple(sorted((1.0, 1.0 - c1 - c2, plus, plus, minus, minus), reverse=True))
    return BlockEigenvalues(c1, c2, lambda3, lambda6)


def q3_block(c1: float, c2: float) -> np.ndarray:
    """Inconclusive-element block over basis orderings (iij, iji, jii)."""
    return np.array(
        [
            [1.0 - c1 / 2.0, 0.0, c1 / 2.0],
            [0.0, 1.0 - c2 / 2.0, c2 / 2.0],
            [c1 / 2.0, c2 / 2.0, 1.0 - c1 / 2.0 - c2 / 2.0],
        ]
    )


def q6_block(c1: float, c2: float) -> np.ndarray:
    """Inconclusive-element block over basis orderings (ijk, kji, jki, ikj, kij, jik)."""
    x = 1.0 - c1 / 2.0 - c2 / 2.0
    a = c1 / 2.0
    b = c2 / 2.0
    return np.array(
        [
            [x, a, 0, 0, 0, b],
            [a, x, b, 0, 0, 0],
            [0, b, x, a, 0, 0],
            [0, 0, a, x, b, 0],
            [0, 0, 0, b, x, a],
            [b, 0, 0, 0, a, x],
        ]
    )


# --- optimal constructions ----------------------------------------------------


def _qubit_optimal_coefficients(priors: Priors) -> tuple[float, float]:
    """Weights of the two conclusive antisymmetrizer projectors, by prior region."""
    eta = priors.eta1
    if eta < 0.2:
        return 0.0, 1.0
    if eta > 0.8:
        return 1.0, 0.0
    lam = (2.0 / 3.0) * (2.0 - math.sqrt(priors.eta2 / priors.eta1))
    return lam, (4.0 - 4.0 * lam) / (4.0 - 3.0 * lam)


def build_qubit_optimal_povm(priors: Priors) -> DensePOVM:
    """Prior-dependent optimal two-reference identification POVM for qubits."""
    coef1, coef2 = _qubit_optimal_coefficients(priors)
    antisym = antisym_projector_pair(2)
    e1 = coef1 * embed_pair_operator(antisym, 2, (PROBE, REF2))
    e2 = coef2 * embed_pair_operator(antisym, 2, (PROBE, REF1))
    e0 = np.eye(8) - e1 - e2
    return DensePOVM([e0, e1, e2], ["inconclusive", "match-1", "match-2"])


def build_hayashi_povm(d: int) -> DensePOVM:
    """Equal-prior optimal universal identification POVM in dimension d.

    The conclusive elements are pair antisymmetrizers reweighted by 2/3 on
    the mixed-symmetry subspace and 1/2 on the totally antisymmetric one.
    For qubits the antisymmetric part is empty and the construction
    collapses to 2/3 times the pair antisymmetrizers.
    """
    if d < 2:
        raise ValueError(f"dimension must be at least 2, got {d}")
    identity = np.eye(d**3)
    gamma_s = sym3_projector(d)
    gamma_as = antisym3_projector(d)
    gamma_mixed = identity - gamma_s - gamma_as
    weight = (2.0 / 3.0) * gamma_mixed + 0.5 * gamma_as
    antisym = antisym_projector_pair(d)
    e1 = weight @ embed_pair_operator(antisym, d, (PROBE, REF2))
    e2 = weight @ embed_pair_operator(antisym, d, (PROBE, REF1))
    # The factors commute exactly; symmetrize away float round-off.
    e1 = (e1 + e1.conj().T) / 2.0
    e2 = (e2 + e2.conj().T) / 2.0
    e0 = identity - e1 - e2
    return DensePOVM([e0, e1, e2], ["inconclusive", "match-1", "match-2"])


def mixing_strategy_povm(
    q: float, d: int, f_dif: np.ndarray | None = None
) -> DensePOVM:
    """Random switching between two pairwise comparators.

    With probability q the probe is compared against reference 2 (a
    conclusive difference means it matches reference 1), otherwise against
    reference 1.  `f_dif` is the pair-space conclusive element of the
    comparator; default is the antisymmetric projector.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"mixing weight must lie in [0, 1], got {q!r}")
    if f_dif is None:
        f_dif = antisym_projector_pair(d)
    e1 = q * embed_pair_operator(f_dif, d, (PROBE, REF2))
    e2 = (1.0 - q) * embed_pair_operator(f_dif, d, (PROBE, REF1))
    e0 = np.eye(d**3) - e1 - e2
    return DensePOVM([e0, e1, e2], ["inconclusive", "match-1", "match-2"])


# --- states and probabilities ---------------------------------------------------


def product_state(psi1: np.ndarray, psi2: np.ndarray, which: int) -> np.ndarray:
    """Input vector (probe x ref1 x ref2) with the probe carrying reference `which`."""
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    probe = psi1 if which == 1 else psi2
    return np.kron(probe, np.kron(psi1, psi2))


def expectation(matrix: np.ndarray, vec: np.ndarray) -> float:
    return float(np.real(np.vdot(vec, matrix @ vec)))


def identification_prob(
    povm: DensePOVM, psi1: np.ndarray, psi2: np.ndarray, priors: Priors
) -> float:
    """Prior-weighted success probability of the POVM on one reference pair."""
    state1 = product_state(psi1, psi2, 1)
    if state1.size != povm.dim:
        raise ValueError(
            f"state dimension {state1.size} does not match POVM dimension {povm.dim}"
        )
    state2 = product_state(psi1, psi2, 2)
    return priors.eta1 * expectation(povm.elements[1], state1) + priors.eta2 * expectation(
        povm.elements[2], state2
    )


# --- random states and Monte Carlo ---------------------------------------------


def haar_state(d: int, seed: int, index: int) -> np.ndarray:
    """Uniformly random pure state, reproducible per (seed, index)."""
    if d < 1:
        raise ValueError("dimension must be positive")
    gen = substream(seed, index)
    vec = gen.normal(size=d) + 1j * gen.normal(size=d)
    return vec / np.linalg.norm(vec)


def haar_state_batch(
    d: int, n: int, seed: int, chunk: int = 1024
) -> np.ndarray:
    """(n, d) array of independent uniform states.

    Uses one derived substream per chunk of rows, so the batch is
    deterministic in (d, n, seed) and chunk-parallelizable; it is a
    different stream from per-index haar_state calls.
    """
    out = np.empty((n, d), dtype=complex)
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        gen = substream(seed, start // chunk)
        block = gen.normal(size=(stop - start, d)) + 1j * gen.normal(size=(stop - start, d))
        out[start:stop] = block
    out /= np.linalg.norm(out, axis=1, keepdims=True)
    return out


def haar_pairs(d: int, n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Two independent (n, d) batches of uniform states."""
    return haar_state_batch(d, n, seed), haar_state_batch(d, n, seed + 1)


def _batch_product_states(
    probe: np.ndarray, ref1: np.ndarray, ref2: np.ndarray
) -> np.ndarray:
    n, d = probe.shape
    return np.einsum("ni,nj,nk->nijk", probe, ref1, ref2).reshape(n, d**3)


def _batch_expectations(matrix: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    return np.real(np.einsum("na,na->n", vecs.conj(), vecs @ matrix.T))


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    n_samples: int
    seed: int


def mean_identification_mc(
    povm: DensePOVM, d: int, n_samples: int, seed: int, priors: Priors | None = None
) -> McEstimate:
    """Monte Carlo average of identification_prob over uniform reference pairs."""
    priors = priors or Priors.equal()
    psi1, psi2 = haar_pairs(d, n_samples, seed)
    states1 = _batch_product_states(psi1, psi1, psi2)
    states2 = _batch_product_states(psi2, psi1, psi2)
    values = priors.eta1 * _batch_expectations(
        povm.elements[1], states1
    ) + priors.eta2 * _batch_expectations(povm.elements[2], states2)
    mean = float(np.mean(values))
    stderr = float(np.std(values, ddof=1) / math.sqrt(n_samples))
    return McEstimate(mean, stderr, n_samples, seed)


def mean_overlap_sq_mc(d: int, n_samples: int, seed: int) -> McEstimate:
    """Monte Carlo mean of |<psi1|psi2>|^2 over uniform pairs (expected 1/d)."""
    psi1, psi2 = haar_pairs(d, n_samples, seed)
    values = np.abs(np.einsum("ni,ni->n", psi1.conj(), psi2)) ** 2
    mean = float(np.mean(values))
    stderr = float(np.std(values, ddof=1) / math.sqrt(n_samples))
    return McEstimate(mean, stderr, n_samples, seed)


def no_error_check(povm: DensePOVM, n_samples: int, seed: int) -> float:
    """Largest conclusive-element expectation on the wrong hypothesis.

    Samples uniform reference pairs and returns
    max(<Psi2|E1|Psi2>, <Psi1|E2|Psi1>) over all of them; a sound
    identification POVM keeps this at numerical zero.
    """
    d = round(povm.dim ** (1.0 / 3.0))
    if d**3 != povm.dim:
        raise ValueError(f"POVM dimension {povm.dim} is not a perfect cube")
    psi1, psi2 = haar_pairs(d, n_samples, seed)
    states1 = _batch_product_states(psi1, psi1, psi2)
    states2 = _batch_product_states(psi2, psi1, psi2)
    wrong1 = _batch_expectations(povm.elements[1], states2)
    wrong2 = _batch_expectations(povm.elements[2], states1)
    return float(max(np.max(np.abs(wrong1)), np.max(np.abs(wrong2))))


# --- restricted phase-circle references -----------------------------------------


@dataclass(frozen=True)
class EquatorialReport:
    """Average-state analysis for references on the qubit phase circle."""

    omega1: np.ndarray
    omega2: np.ndarray
    kernel_vectors_1: tuple[np.ndarray, np.ndarray]
    kernel_vectors_2: tuple[np.ndarray, np.ndarray]
    max_kernel_residual: float
    povm: DensePOVM
    max_difference_vs_universal: float


def _phase_circle_average_pair() -> np.ndarray:
    """Average of |phi><phi| x |phi><phi| over the qubit phase circle, times 4."""
    ket00 = np.zeros(4)
    ket00[0] = 1.0
    ket11 = np.zeros(4)
    ket11[3] = 1.0
    psi_plus = np.zeros(4)
    psi_plus[1] = psi_plus[2] = 1.0 / math.sqrt(2.0)
    return (
        np.outer(ket00, ket00) + np.outer(ket11, ket11) + 2.0 * np.outer(psi_plus, psi_plus)
    )


def equatorial_analysis(priors: Priors | None = None) -> EquatorialReport:
    """Optimal identification POVM for phase-circle qubits.

    Builds the average input states, verifies the kernel vectors that
    bound the conclusive elements' supports, assembles the optimal POVM on
    those kernels, and measures its elementwise distance from the
    unrestricted qubit optimum (which it should reproduce exactly: knowing
    the references lie on the phase circle does not help).
    """
    priors = priors or Priors.equal()
    pair_avg = _phase_circle_average_pair()
    omega1 = embed_pair_operator(pair_avg, 2, (PROBE, REF1)) / 8.0
    omega2 = embed_pair_operator(pair_avg, 2, (PROBE, REF2)) / 8.0

    psi_minus = np.zeros(4)
    psi_minus[1] = 1.0 / math.sqrt(2.0)
    psi_minus[2] = -1.0 / math.sqrt(2.0)
    basis = np.eye(2)
    # a_j span the allowed support of the match-1 element (kernel of omega2),
    # b_j of the match-2 element (kernel of omega1).
    a_vecs = tuple(
        embed_pair_vector(psi_minus, basis[j], 2, (PROBE, REF2)) for j in range(2)
    )
    b_vecs = tuple(
        embed_pair_vector(psi_minus, basis[j], 2, (PROBE, REF1)) for j in range(2)
    )
    residual = max(
        max(float(np.linalg.norm(omega2 @ a)) for a in a_vecs),
        max(float(np.linalg.norm(omega1 @ b)) for b in b_vecs),
    )

    coef1, coef2 = _qubit_optimal_coefficients(priors)
    e1 = coef1 * sum(np.outer(a, a.conj()) for a in a_vecs)
    e2 = coef2 * sum(np.outer(b, b.conj()) for b in b_vecs)
    e0 = np.eye(8) - e1 - e2
    povm = DensePOVM([e0, e1, e2], ["inconclusive", "match-1", "match-2"])

    universal = build_qubit_optimal_povm(priors)
    diff = max(
        float(np.max(np.abs(a - b)))
        for a, b in zip(povm.elements, universal.elements)
    )
    return EquatorialReport(
        omega1=omega1,
        omega2=omega2,
        kernel_vectors_1=a_vecs,
        kernel_vectors_2=b_vecs,
        max_kernel_residual=residual,
        povm=povm,
        max_difference_vs_universal=diff,
    )
