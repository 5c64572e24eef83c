"""Assembly of linear systems whose matrix is a damped walk transition matrix.

A system is ``(1 - gamma * P) x = b`` for a walk-backed or explicit
transition matrix P, or ``(1 - B) x = b`` with ``B = P * v`` entrywise when
per-edge weights are supplied. The weighted form absorbs the damping into
the weights, so gamma is ignored when weights are present; it is only valid
when the spectral radius of B is strictly below one, which is checked at
build time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .walks import (
    MAX_DENSE_BITS,
    CapacityError,
    TransitionMatrix,
    WalkSpec,
    build_transition_matrix,
)

#: Dense spectral-radius checks are exact up to this many nodes.
MAX_EXACT_RADIUS = 4096

_POWER_ITERATIONS = 200
_POWER_TOL = 1e-8


class SpectralRadiusError(ValueError):
    """Weighted system rejected because its series would not converge."""


def spectral_radius(m: np.ndarray) -> float:
    """Largest |eigenvalue|; dense solve at desk scale, power iteration above."""
    m = np.asarray(m, dtype=float)
    if m.shape[0] <= MAX_EXACT_RADIUS:
        return float(np.abs(np.linalg.eigvals(m)).max())
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(0)))
    vec = rng.standard_normal(m.shape[0])
    vec /= np.linalg.norm(vec)
    radius = 0.0
    for _ in range(_POWER_ITERATIONS):
        nxt = m @ vec
        scale = np.linalg.norm(nxt)
        if scale == 0.0:
            return 0.0
        nxt /= scale
        if abs(scale - radius) < _POWER_TOL:
            return float(scale)
        radius, vec = scale, nxt
    return float(radius)


@dataclass(frozen=True)
class LinearSystem:
    """A solvable system: walk or explicit matrix, damping, constants, weights."""

    gamma: float
    b: np.ndarray
    walk: WalkSpec | None = None
    matrix: TransitionMatrix | None = None
    weights: np.ndarray | None = None

    @property
    def nodes(self) -> int:
        return self.walk.nodes if self.walk is not None else self.matrix.nodes

    @property
    def n(self) -> int:
        return self.walk.n if self.walk is not None else self.matrix.n

    def dense_p(self) -> np.ndarray:
        """Dense transition matrix (builds it for walk-backed systems)."""
        if self.matrix is not None:
            return self.matrix.entries
        return build_transition_matrix(self.walk).entries

    def dense_a(self) -> np.ndarray:
        """The dense system matrix: 1 - gamma P, or 1 - P*v when weighted."""
        p = self.dense_p()
        eye = np.eye(self.nodes)
        if self.weights is not None:
            return eye - p * self.weights
        return eye - self.gamma * p


def build_system(
    spec_or_matrix: WalkSpec | TransitionMatrix | np.ndarray,
    gamma: float,
    b: np.ndarray,
    weights: np.ndarray | None = None,
) -> LinearSystem:
    """Validate and assemble a system; the dense matrix is never materialised here
    unless a weighted build needs it for the spectral-radius check."""
    walk: WalkSpec | None = None
    matrix: TransitionMatrix | None = None
    if isinstance(spec_or_matrix, WalkSpec):
        walk = spec_or_matrix
        nodes = walk.nodes
    else:
        if isinstance(spec_or_matrix, TransitionMatrix):
            matrix = spec_or_matrix
        else:
            entries = np.asarray(spec_or_matrix, dtype=float)
            if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
                raise ValueError(f"matrix must be square, got {entries.shape}")
            n = entries.shape[0].bit_length() - 1
            if (1 << n) != entries.shape[0]:
                raise ValueError(f"matrix size must be a power of two, got {entries.shape[0]}")
            matrix = TransitionMatrix(n, entries)
        matrix.validate()
        nodes = matrix.nodes

    b = np.asarray(b, dtype=float)
    if b.shape != (nodes,):
        raise ValueError(f"b must have length {nodes}, got shape {b.shape}")
    if not np.isfinite(b).all():
        raise ValueError("b must be finite")

    if weights is None:
        if not 0.0 < gamma < 1.0:
            raise ValueError(f"gamma must be in (0, 1), got {gamma}")
    else:
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (nodes, nodes):
            raise ValueError(f"weights must be {nodes} x {nodes}, got {weights.shape}")
        if not np.isfinite(weights).all():
            raise ValueError("weights must be finite")
        if walk is not None and walk.n > MAX_DENSE_BITS:
            raise CapacityError(
                f"weighted systems need a dense matrix (n <= {MAX_DENSE_BITS})"
            )
        p = matrix.entries if matrix is not None else build_transition_matrix(walk).entries
        radius = spectral_radius(p * weights)
        if radius >= 1.0:
            raise SpectralRadiusError(
                f"weighted matrix has spectral radius {radius:.6g} >= 1"
            )

    return LinearSystem(gamma=gamma, b=b, walk=walk, matrix=matrix, weights=weights)


def random_system(
    seed: int,
    n: int,
    *,
    q: int = 1,
    gamma: float = 0.3,
    kind: str = "quantum",
    order: str = "ascending",
) -> LinearSystem:
    """Draw a system with uniform angles in [0, pi] and b entries in [-1, 1].

    Coin phases are only drawn (also from [0, pi]) when the walk runs two or
    more evolutions; a single evolution ignores them. Byte-reproducible from
    the seed.
    """
    from .walks import CoinParams, WalkSpec  # local import keeps module load light

    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    thetas = rng.uniform(0.0, np.pi, n)
    if q >= 2:
        phis = rng.uniform(0.0, np.pi, n)
        lams = rng.uniform(0.0, np.pi, n)
    else:
        phis = np.zeros(n)
        lams = np.zeros(n)
    b = rng.uniform(-1.0, 1.0, 1 << n)
    coins = tuple(CoinParams(t, p, l) for t, p, l in zip(thetas, phis, lams))
    return build_system(WalkSpec(n, coins, q=q, order=order, kind=kind), gamma, b)
