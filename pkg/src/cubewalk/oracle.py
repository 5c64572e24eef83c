"""Dense reference solvers used to cross-check the sampling estimators.

Deliberately independent of the walk/sampling code paths: everything here
works on explicit dense arrays through LAPACK so that agreement with the
Monte Carlo side is a genuine two-route check.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

#: LU pivots with absolute value below this are treated as singular.
PIVOT_FLOOR = 1e-14

#: Direct solves must reach this relative infinity-norm residual.
RESIDUAL_TOL = 1e-9


class SingularMatrixError(ValueError):
    """Elimination hit a pivot too small to trust."""


@dataclass(frozen=True)
class DenseSystem:
    """An explicit square system ``a @ x = b``."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"matrix must be square, got shape {a.shape}")
        if b.shape != (a.shape[0],):
            raise ValueError(f"vector length {b.shape} does not match matrix {a.shape}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)


def direct_solve(d: DenseSystem) -> np.ndarray:
    """Gaussian elimination with partial pivoting, with a residual check."""
    with warnings.catch_warnings():
        # exact zero pivots are reported through SingularMatrixError below
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(d.a)
    smallest = np.abs(np.diag(lu)).min()
    if smallest < PIVOT_FLOOR:
        raise SingularMatrixError(f"pivot {smallest:g} below {PIVOT_FLOOR:g}")
    x = scipy.linalg.lu_solve((lu, piv), d.b)
    residual = np.abs(d.a @ x - d.b).max()
    if residual > RESIDUAL_TOL * max(np.abs(d.b).max(), 1e-300):
        raise SingularMatrixError(
            f"residual {residual:g} exceeds {RESIDUAL_TOL:g} * ||b||"
        )
    return x


def neumann_sum_dense(
    p: np.ndarray, gamma: float, b: np.ndarray, c: int
) -> np.ndarray:
    """Truncated geometric series sum_{s=0..c} gamma^s P^s b by repeated products."""
    if c < 0:
        raise ValueError(f"truncation order must be >= 0, got {c}")
    p = np.asarray(getattr(p, "entries", p), dtype=float)
    term = np.asarray(b, dtype=float).copy()
    acc = term.copy()
    for _ in range(c):
        term = gamma * (p @ term)
        acc += term
    return acc
