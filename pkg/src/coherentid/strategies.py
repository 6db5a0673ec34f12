"""Closed-form identification probability curves for coherent-state pairs.

Each strategy's success probability depends on the references only through
the amplitude separation ``delta_abs = |alpha1 - alpha2|``.  The functions
accept scalars or numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar


@dataclass(frozen=True)
class Priors:
    """Prior probabilities of the two hypotheses; must sum to one."""

    eta1: float
    eta2: float

    def __post_init__(self):
        if not (0.0 <= self.eta1 <= 1.0 and 0.0 <= self.eta2 <= 1.0):
            raise ValueError("priors must lie in [0, 1]")
        if abs(self.eta1 + self.eta2 - 1.0) > 1e-12:
            raise ValueError(f"priors must sum to 1, got {self.eta1 + self.eta2}")

    @classmethod
    def equal(cls) -> "Priors":
        return cls(0.5, 0.5)

    @classmethod
    def from_eta1(cls, eta1: float) -> "Priors":
        return cls(eta1, 1.0 - eta1)


@dataclass(frozen=True)
class CurvePoint:
    delta_abs: float
    strategy: str
    probability: float


@dataclass(frozen=True)
class OrderingReport:
    """Pointwise check of the strategy dominance chain on a grid."""

    grid: np.ndarray
    max_violation: float
    n_violations: int
    inequalities: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return self.n_violations == 0


def _check_nonnegative(delta_abs) -> np.ndarray:
    arr = np.asarray(delta_abs, dtype=float)
    if np.any(arr < 0):
        raise ValueError("delta_abs must be non-negative")
    return arr


# Curves are written as -expm1(-x) rather than 1 - exp(-x); the naive form
# loses all precision for nearly coincident references.


def p_sb(delta_abs):
    """Swap-based universal strategy: (1 - exp(-delta^2)) / 4."""
    arr = _check_nonnegative(delta_abs)
    return -np.expm1(-(arr**2)) / 4.0


def p_opt(delta_abs):
    """Optimal universal strategy: (1 - exp(-delta^2)) / 3."""
    arr = _check_nonnegative(delta_abs)
    return -np.expm1(-(arr**2)) / 3.0


def p_sbf(delta_abs):
    """Swap-like strategy restricted to coherent states, at the c1 + c2 = 1 boundary."""
    arr = _check_nonnegative(delta_abs)
    return -np.expm1(-(arr**2) / 2.0) / 2.0


def p_idp_known(delta_abs):
    """Equal-prior discrimination of two *known* coherent states: 1 - |<a1|a2>|."""
    arr = _check_nonnegative(delta_abs)
    return -np.expm1(-(arr**2) / 2.0)


def bs_exponents(t1: float) -> tuple[float, float]:
    """Detector exponent factors of the three-splitter setup.

    Returns (f1, f2) such that the match-1 and match-2 detectors click with
    probabilities 1 - exp(-f1 |delta|^2) and 1 - exp(-f2 |delta|^2).
    """
    if not 0.0 < t1 < 1.0:
        raise ValueError(f"t1 must lie strictly inside (0, 1), got {t1!r}")
    return (1.0 - t1) / (2.0 - t1), t1 / (1.0 + t1)


def _p_bs_from_dsq(delta_sq: float, t1: float, priors: Priors) -> float:
    f1, f2 = bs_exponents(t1)
    p1 = -np.expm1(-f1 * delta_sq)
    p2 = -np.expm1(-f2 * delta_sq)
    return priors.eta1 * p1 + priors.eta2 * p2


def p_bs(alpha1: complex, alpha2: complex, t1: float, priors: Priors) -> float:
    """Success probability of the three-beamsplitter setup."""
    return float(_p_bs_from_dsq(abs(alpha1 - alpha2) ** 2, t1, priors))


def p_bs_delta(delta_abs, t1: float, priors: Priors):
    """Same curve parametrized by the separation |alpha1 - alpha2|."""
    arr = _check_nonnegative(delta_abs)
    return _p_bs_from_dsq(arr**2, t1, priors)


def optimize_t1(
    alpha1: complex, alpha2: complex, priors: Priors, xatol: float = 1e-9
) -> float:
    """First-splitter transmittivity maximizing the setup's success probability.

    Derivative-free bounded search; at equal priors the maximum sits at 1/2
    for every reference pair, while lopsided priors push the optimum toward
    the boundary favoring the likelier hypothesis.
    """
    delta_sq = abs(alpha1 - alpha2) ** 2
    if delta_sq == 0.0:
        raise ValueError("references coincide; the objective is identically zero")
    result = minimize_scalar(
        lambda t: -_p_bs_from_dsq(delta_sq, t, priors),
        bounds=(1e-12, 1.0 - 1e-12),
        method="bounded",
        options={"xatol": xatol},
    )
    return float(result.x)


def verify_ordering(grid) -> OrderingReport:
    """Check p_sb <= p_sbf <= p_bs <= p_idp and p_opt <= p_bs pointwise.

    The beamsplitter curve is evaluated at its equal-prior optimum t1 = 1/2.
    max_violation is the raw largest excess; the violation count ignores
    excesses below a few ulps of the compared values, where IEEE rounding
    can invert a sub-ulp true gap (relevant only for separations near 1e-8).
    """
    arr = _check_nonnegative(grid)
    if arr.size == 0:
        raise ValueError("grid must be nonempty")
    bs = p_bs_delta(arr, 0.5, Priors.equal())
    chain = (
        ("p_sb <= p_sbf", p_sb(arr), p_sbf(arr)),
        ("p_sbf <= p_bs", p_sbf(arr), bs),
        ("p_opt <= p_bs", p_opt(arr), bs),
        ("p_bs <= p_idp_known", bs, p_idp_known(arr)),
    )
    max_violation = -np.inf
    n_violations = 0
    for _, lhs, rhs in chain:
        excess = lhs - rhs
        noise_floor = 4.0 * np.finfo(float).eps * np.maximum(np.abs(lhs), np.abs(rhs))
        max_violation = max(max_violation, float(np.max(excess)))
        n_violations += int(np.sum(excess > noise_floor))
    return OrderingReport(
        grid=arr,
        max_violation=max_violation,
        n_violations=n_violations,
        inequalities=tuple(name for name, _, _ in chain),
    )


def mean_p_universal(d: int, strategy: str) -> float:
    """Average success probability of a universal strategy over uniform pairs."""
    if d < 2:
        raise ValueError(f"dimension must be at least 2, got {d}")
    if strategy == "sb":
        return (d - 1) / (4.0 * d)
    if strategy == "opt":
        return (d - 1) / (3.0 * d)
    raise ValueError(f"unknown strategy {strategy!r}, expected 'sb' or 'opt'")


CURVE_FUNCTIONS = {
    "sb": p_sb,
    "opt": p_opt,
    "sbf": p_sbf,
    "bs": lambda delta: p_bs_delta(delta, 0.5, Priors.equal()),
    "idp": p_idp_known,
}
