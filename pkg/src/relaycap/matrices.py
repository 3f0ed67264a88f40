"""Hermitian matrix utilities and the conditional-covariance order check.

Everything here operates on plain numpy arrays. 1x1 and 2x2 eigenvalues use
the closed trace/determinant form so the core comparisons stay dependency
free; larger matrices fall back to numpy's Hermitian solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "is_hermitian",
    "eigenvalues_ascending",
    "LoewnerRelation",
    "LoewnerVerdict",
    "loewner_compare",
    "FiniteJoint",
    "CovBoundReport",
    "conditional_cov_bound_check",
]

HERMITIAN_TOL = 1e-12


def _as_square(m) -> np.ndarray:
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr.view(float))):
        raise ValueError("matrix contains non-finite entries")
    return arr


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    """True if every entry of m - m^H has magnitude at most tol."""
    arr = _as_square(m)
    return bool(np.max(np.abs(arr - arr.conj().T)) <= tol)


def eigenvalues_ascending(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, sorted ascending."""
    arr = _as_square(m)
    if not is_hermitian(arr, tol):
        raise ValueError("matrix is not Hermitian within tolerance")
    n = arr.shape[0]
    if n == 1:
        return np.array([arr[0, 0].real])
    if n == 2:
        # trace/determinant closed form: mean +- sqrt((gap/2)^2 + |offdiag|^2)
        a = arr[0, 0].real
        d = arr[1, 1].real
        mean = 0.5 * (a + d)
        radius = np.hypot(0.5 * (a - d), abs(arr[0, 1]))
        return np.array([mean - radius, mean + radius])
    return np.linalg.eigvalsh(arr)


class LoewnerRelation(Enum):
    STRICTLY_GREATER = "strictly_greater"
    GREATER_OR_EQUAL = "greater_or_equal"
    INDEFINITE = "indefinite"


@dataclass(frozen=True)
class LoewnerVerdict:
    """Outcome of comparing a - b in the semidefinite order."""

    relation: LoewnerRelation
    min_eigenvalue: float

    @property
    def is_ordered(self) -> bool:
        return self.relation is not LoewnerRelation.INDEFINITE


def loewner_compare(a, b, tol: float = 1e-9) -> LoewnerVerdict:
    """Classify a - b by the sign of its minimum eigenvalue against +-tol.

    min eig > tol: strictly greater; |min eig| <= tol: greater or equal
    within tolerance; min eig < -tol: not comparable in this direction
    (reported as indefinite).
    """
    a = _as_square(a)
    b = _as_square(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    lam = float(eigenvalues_ascending(a - b)[0])
    if lam > tol:
        relation = LoewnerRelation.STRICTLY_GREATER
    elif lam >= -tol:
        relation = LoewnerRelation.GREATER_OR_EQUAL
    else:
        relation = LoewnerRelation.INDEFINITE
    return LoewnerVerdict(relation=relation, min_eigenvalue=lam)


@dataclass(frozen=True, eq=False)
class FiniteJoint:
    """Finite-support joint distribution of a vector X and a scalar label/value Y.

    x has shape (n_atoms, dim), y shape (n_atoms,), probs shape (n_atoms,)
    and must sum to 1. y doubles as a grouping label for conditional
    quantities and, when numeric, as the scalar variable of cross-covariance
    computations.
    """

    x: np.ndarray
    y: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        x = np.atleast_2d(np.asarray(self.x, dtype=complex))
        y = np.asarray(self.y, dtype=complex).reshape(-1)
        p = np.asarray(self.probs, dtype=float).reshape(-1)
        if x.shape[0] != y.size or y.size != p.size:
            raise ValueError(
                f"inconsistent atom counts: x has {x.shape[0]}, y has {y.size}, probs has {p.size}"
            )
        if not (np.all(np.isfinite(x.view(float))) and np.all(np.isfinite(y.view(float)))):
            raise ValueError("joint contains non-finite support points")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ValueError("probabilities must be finite and nonnegative")
        if abs(p.sum() - 1.0) > 1e-9:
            raise ValueError(f"probabilities must sum to 1, got {p.sum()!r}")
        for arr in (x, y, p):
            arr.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "probs", p)

    @property
    def dim(self) -> int:
        return self.x.shape[1]


@dataclass(frozen=True)
class CovBoundReport:
    """Both sides of the conditional-covariance bound plus the order verdict."""

    lhs: np.ndarray  # averaged conditional covariance E_Y cov[X|Y]
    rhs: np.ndarray  # cov[X] - cov[X,Y] cov[X,Y]^H / var[Y]
    verdict: LoewnerVerdict
    sampled: bool

    @property
    def holds(self) -> bool:
        return self.verdict.is_ordered


def _exact_cov_bound(joint: FiniteJoint, tol: float) -> tuple[np.ndarray, np.ndarray]:
    x, y, p = joint.x, joint.y, joint.probs
    mean_x = p @ x
    xc = x - mean_x
    cov_x = np.einsum("k,ki,kj->ij", p, xc, xc.conj())

    # cov of conditional means, grouping atoms by identical y
    _, inverse = np.unique(y, return_inverse=True)
    n_groups = int(inverse.max()) + 1
    group_p = np.zeros(n_groups)
    np.add.at(group_p, inverse, p)
    group_mean = np.zeros((n_groups, joint.dim), dtype=complex)
    np.add.at(group_mean, inverse, p[:, None] * xc)
    nonzero = group_p > 0
    group_mean[nonzero] /= group_p[nonzero, None]
    cov_means = np.einsum("g,gi,gj->ij", group_p, group_mean, group_mean.conj())
    lhs = cov_x - cov_means

    mean_y = p @ y
    yc = y - mean_y
    var_y = float(np.real(p @ (yc * yc.conj())))
    if var_y <= tol:
        raise ValueError("var[Y] is zero; the bound requires a non-degenerate Y")
    cross = np.einsum("k,ki,k->i", p, xc, yc.conj())
    rhs = cov_x - np.outer(cross, cross.conj()) / var_y
    return lhs, rhs


def conditional_cov_bound_check(
    joint,
    num_samples: int = 200_000,
    rng_seed: int | None = None,
    num_bins: int = 32,
    tol: float = 1e-9,
) -> CovBoundReport:
    """Check E_Y cov[X|Y] <= cov[X] - cov[X,Y] cov[X,Y]^H / var[Y].

    joint is either a FiniteJoint (checked exactly by enumerating the
    support) or a callable sampler(rng, n) -> (X, Y) for continuous test
    distributions; sampled draws are binned on Y into equal-count bins (bin
    mean as the conditioning value) and the empirical measure is then checked
    exactly, so no statistical tolerance enters the verdict.
    """
    sampled = not isinstance(joint, FiniteJoint)
    if sampled:
        if rng_seed is None:
            raise ValueError("a sampler requires rng_seed")
        rng = np.random.default_rng(rng_seed)
        x, y = joint(rng, num_samples)
        x = np.atleast_2d(np.asarray(x, dtype=complex))
        y = np.asarray(y, dtype=float).reshape(-1)
        if x.shape[0] != y.size:
            raise ValueError("sampler returned mismatched X and Y counts")
        order = np.argsort(y, kind="stable")
        bins = np.array_split(order, num_bins)
        y_binned = np.empty_like(y)
        for idx in bins:
            if idx.size:
                y_binned[idx] = y[idx].mean()
        joint = FiniteJoint(x=x, y=y_binned, probs=np.full(y.size, 1.0 / y.size))
    lhs, rhs = _exact_cov_bound(joint, tol)
    verdict = loewner_compare(rhs, lhs, tol)
    return CovBoundReport(lhs=lhs, rhs=rhs, verdict=verdict, sampled=sampled)
