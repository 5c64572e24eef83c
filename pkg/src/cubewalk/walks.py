"""Closed-form transition matrices for coin-driven walks on the Hamming cube.

A walk over ``N = 2**n`` nodes is specified per bit by rotation angles
``(theta, phi, lam)`` and runs for ``q`` evolutions in ascending or
descending bit order. The classical walk flips every bit independently; the
quantum walk drives all flips with one shared coin qubit, which correlates
adjacent bits and makes the resulting matrix non-factorisable in general.

Every matrix built here is translation-invariant on the cube: the entry for
``(j_to, j_from)`` depends only on ``j_to ^ j_from``. Builders therefore
compute the flip-mask distribution (the row of node 0) once and assemble
the dense matrix by XOR indexing. Scalar ``*_entry`` functions evaluate the
same probabilities one pair at a time and act as an independent route for
cross-checks.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from .hamming import ASCENDING, DESCENDING

CLASSICAL = "classical"
QUANTUM = "quantum"

#: Largest bit-width for which dense N x N matrices are built (N = 4096).
MAX_DENSE_BITS = 12

_ORDERS = (ASCENDING, DESCENDING)
_KINDS = (CLASSICAL, QUANTUM)


class CapacityError(ValueError):
    """Requested dense object exceeds the desk-scale size cap."""


@dataclass(frozen=True, slots=True)
class CoinParams:
    """Rotation angles of one coin toss: polar ``theta``, phases ``phi``, ``lam``."""

    theta: float
    phi: float = 0.0
    lam: float = 0.0

    def __post_init__(self) -> None:
        for name in ("theta", "phi", "lam"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


@dataclass(frozen=True, slots=True)
class WalkSpec:
    """Full description of a walk: per-bit coins, evolution count, order, kind."""

    n: int
    coins: tuple[CoinParams, ...]
    q: int = 1
    order: str = ASCENDING
    kind: str = QUANTUM

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"need at least one bit, got n={self.n}")
        object.__setattr__(self, "coins", tuple(self.coins))
        if len(self.coins) != self.n:
            raise ValueError(f"expected {self.n} coins, got {len(self.coins)}")
        if self.q < 1:
            raise ValueError(f"evolution count must be >= 1, got {self.q}")
        if self.order not in _ORDERS:
            raise ValueError(f"order must be one of {_ORDERS}, got {self.order!r}")
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}, got {self.kind!r}")

    @property
    def nodes(self) -> int:
        return 1 << self.n

    def thetas(self) -> np.ndarray:
        return np.array([c.theta for c in self.coins])


@dataclass(frozen=True)
class TransitionMatrix:
    """Dense row-stochastic symmetric matrix of walk step probabilities."""

    n: int
    entries: np.ndarray

    @property
    def nodes(self) -> int:
        return 1 << self.n

    @classmethod
    def from_flip_distribution(cls, n: int, row0: np.ndarray) -> "TransitionMatrix":
        """Assemble the full matrix from the flip-mask distribution of node 0."""
        idx = np.arange(1 << n)
        return cls(n, row0[np.bitwise_xor.outer(idx, idx)])

    def flip_distribution(self) -> np.ndarray:
        return self.entries[0].copy()

    def validate(self, *, negativity=1e-12, row_sum=1e-9, symmetry=1e-12) -> None:
        """Raise if stochasticity, symmetry, or nonnegativity are violated."""
        p = self.entries
        if p.shape != (self.nodes, self.nodes):
            raise ValueError(f"expected shape {(self.nodes, self.nodes)}, got {p.shape}")
        if p.min() < -negativity:
            raise ValueError(f"negative entry {p.min():g}")
        dev = np.abs(p.sum(axis=1) - 1.0).max()
        if dev > row_sum:
            raise ValueError(f"row sums deviate from 1 by {dev:g}")
        asym = np.abs(p - p.T).max()
        if asym > symmetry:
            raise ValueError(f"matrix asymmetric by {asym:g}")


def u3_matrix(p: CoinParams) -> np.ndarray:
    """The 2x2 single-qubit U3 rotation gate for the given angles."""
    ct, st = math.cos(p.theta / 2.0), math.sin(p.theta / 2.0)
    return np.array(
        [
            [ct, -cmath.exp(1j * p.lam) * st],
            [cmath.exp(1j * p.phi) * st, cmath.exp(1j * (p.lam + p.phi)) * ct],
        ]
    )


def u3_entry(p: CoinParams, mu: int, nu: int) -> complex:
    """Element (mu, nu) of the U3 gate in closed phase/sign/product form."""
    if mu not in (0, 1) or nu not in (0, 1):
        raise ValueError(f"mu, nu must be bits, got ({mu}, {nu})")
    flip = mu ^ nu
    mag = math.cos(p.theta / 2.0) ** (1 - flip) * math.sin(p.theta / 2.0) ** flip
    return cmath.exp(1j * (mu * p.phi + nu * p.lam)) * (-1.0) ** ((1 - mu) * nu) * mag


# ---------------------------------------------------------------------------
# scalar entry formulas


def _require(spec: WalkSpec, kind: str, q: int) -> None:
    if spec.kind != kind or spec.q != q:
        raise ValueError(
            f"formula needs kind={kind!r}, q={q}; got kind={spec.kind!r}, q={spec.q}"
        )


def classical_entry(spec: WalkSpec, j_from: int, j_to: int) -> float:
    """One-step probability of the independent bit-flip walk."""
    _require(spec, CLASSICAL, 1)
    mask = j_from ^ j_to
    prob = 1.0
    for l, coin in enumerate(spec.coins):
        s2 = math.sin(coin.theta / 2.0) ** 2
        prob *= s2 if (mask >> l) & 1 else 1.0 - s2
    return prob


def classical_two_step_entry(spec: WalkSpec, j_from: int, j_to: int) -> float:
    """Two-step probability of the bit-flip walk; still a per-bit product."""
    _require(spec, CLASSICAL, 2)
    mask = j_from ^ j_to
    prob = 1.0
    for l, coin in enumerate(spec.coins):
        c2 = math.cos(coin.theta / 2.0) ** 2
        s2 = math.sin(coin.theta / 2.0) ** 2
        flip = 2.0 * c2 * s2
        prob *= flip if (mask >> l) & 1 else c2 * c2 + s2 * s2
    return prob


def _transition_mask(mask: int, n: int, order: str) -> int:
    # Adjacent-bit transition pattern of the flip mask, zero-padded at the
    # end the walk visits last.
    if order == ASCENDING:
        return (mask ^ (mask << 1)) & ((1 << n) - 1)
    return mask ^ (mask >> 1)


def quantum_entry_one(spec: WalkSpec, j_from: int, j_to: int) -> float:
    """Single-evolution probability of the shared-coin walk.

    The exponent of each sin^2/cos^2 factor is the transition between
    adjacent mask bits, not the bit itself; that coupling is what the one
    coin qubit introduces.
    """
    _require(spec, QUANTUM, 1)
    trans = _transition_mask(j_from ^ j_to, spec.n, spec.order)
    prob = 1.0
    for l, coin in enumerate(spec.coins):
        s2 = math.sin(coin.theta / 2.0) ** 2
        prob *= s2 if (trans >> l) & 1 else 1.0 - s2
    return prob


def _bit_reverse(x: int, n: int) -> int:
    r = 0
    for _ in range(n):
        r = (r << 1) | (x & 1)
        x >>= 1
    return r


def quantum_entry_two(spec: WalkSpec, j_from: int, j_to: int) -> float:
    """Two-evolution probability of the shared-coin walk.

    Coherent sum over all 2**n first-evolution flip masks before squaring,
    split by the final coin bit; O(2**n * n) per entry. Minus signs and the
    phi/lam phases interfere, which is why no per-bit product form exists.
    """
    _require(spec, QUANTUM, 2)
    if spec.order == DESCENDING:
        flipped = replace(spec, coins=spec.coins[::-1], order=ASCENDING)
        mask = _bit_reverse(j_from ^ j_to, spec.n)
        return quantum_entry_two(flipped, 0, mask)
    n = spec.n
    gates = [u3_matrix(c) for c in spec.coins]
    mask = j_from ^ j_to
    acc = [0.0 + 0.0j, 0.0 + 0.0j]
    for second in range(1 << n):
        first = second ^ mask
        # first evolution: coin path over bits of `first`, entered at coin 0
        amp = gates[0][first & 1, 0]
        prev = first & 1
        for l in range(1, n):
            bit = (first >> l) & 1
            amp *= gates[l][bit, prev]
            prev = bit
        # second evolution enters at the first evolution's final coin bit
        carry = (first >> (n - 1)) & 1
        amp *= gates[0][second & 1, carry]
        prev = second & 1
        for l in range(1, n):
            bit = (second >> l) & 1
            amp *= gates[l][bit, prev]
            prev = bit
        acc[(second >> (n - 1)) & 1] += amp
    return abs(acc[0]) ** 2 + abs(acc[1]) ** 2


# ---------------------------------------------------------------------------
# vectorised flip-mask distributions (row of node 0)


def _per_bit_flip_probs(spec: WalkSpec) -> np.ndarray:
    # After q independent rounds, bit l has flipped with probability
    # (1 - cos(theta_l)**q) / 2.
    return 0.5 * (1.0 - np.cos(spec.thetas()) ** spec.q)


def _product_distribution(flip_probs: np.ndarray) -> np.ndarray:
    row = np.ones(1)
    for p in flip_probs[::-1]:  # high bits outermost
        row = np.kron(row, np.array([1.0 - p, p]))
    return row


def _classical_flip_distribution(spec: WalkSpec) -> np.ndarray:
    return _product_distribution(_per_bit_flip_probs(spec))


def _transition_masks(masks: np.ndarray, n: int, order: str) -> np.ndarray:
    if order == ASCENDING:
        return (masks ^ (masks << 1)) & ((1 << n) - 1)
    return masks ^ (masks >> 1)


def _quantum_flip_distribution_one(spec: WalkSpec) -> np.ndarray:
    masks = np.arange(spec.nodes)
    base = _product_distribution(0.5 * (1.0 - np.cos(spec.thetas())))
    return base[_transition_masks(masks, spec.n, spec.order)]


def _bit_reverse_table(n: int) -> np.ndarray:
    return np.array([_bit_reverse(i, n) for i in range(1 << n)])


def _quantum_flip_distribution_two(spec: WalkSpec) -> np.ndarray:
    if spec.order == DESCENDING:
        flipped = replace(spec, coins=spec.coins[::-1], order=ASCENDING)
        return _quantum_flip_distribution_two(flipped)[_bit_reverse_table(spec.n)]
    n, size = spec.n, spec.nodes
    gates = [u3_matrix(c) for c in spec.coins]
    idx = np.arange(size)
    bits = [(idx >> l) & 1 for l in range(n)]
    core = np.ones(size, dtype=complex)
    for l in range(1, n):
        core *= gates[l][bits[l], bits[l - 1]]
    # amp[x, e]: coin-path amplitude over the bits of x, entered at coin e
    amp = np.empty((size, 2), dtype=complex)
    amp[:, 0] = gates[0][bits[0], 0] * core
    amp[:, 1] = gates[0][bits[0], 1] * core
    top = bits[n - 1]
    row = np.empty(size)
    for mask in range(size):
        first = idx ^ mask
        terms = amp[first, 0] * amp[idx, top[first]]
        row[mask] = (
            abs(terms[top == 0].sum()) ** 2 + abs(terms[top == 1].sum()) ** 2
        )
    return row


def flip_distribution(spec: WalkSpec) -> np.ndarray:
    """Probability of each flip mask after one full walk step (q evolutions)."""
    if spec.kind == CLASSICAL:
        return _classical_flip_distribution(spec)
    if spec.q == 1:
        return _quantum_flip_distribution_one(spec)
    if spec.q == 2:
        return _quantum_flip_distribution_two(spec)
    # no closed form beyond two evolutions: run the statevector circuit once
    from .simulator import walk_marginal

    return walk_marginal(0, spec)


def build_transition_matrix(spec: WalkSpec) -> TransitionMatrix:
    """Dense N x N step matrix; capped at ``MAX_DENSE_BITS`` bits."""
    if spec.n > MAX_DENSE_BITS:
        raise CapacityError(
            f"dense build needs n <= {MAX_DENSE_BITS}, got n={spec.n}"
        )
    tm = TransitionMatrix.from_flip_distribution(spec.n, flip_distribution(spec))
    tm.validate()
    return tm


# ---------------------------------------------------------------------------
# matrix diagnostics


def condition_number(a: np.ndarray) -> float:
    """2-norm condition number of a symmetric matrix via eigendecomposition."""
    a = np.asarray(a, dtype=float)
    if np.abs(a - a.T).max() > 1e-10:
        raise ValueError("condition_number expects a symmetric matrix")
    mags = np.abs(np.linalg.eigvalsh(a))
    smallest = mags.min()
    if smallest == 0.0:
        return math.inf
    return float(mags.max() / smallest)


def check_gray_equivalence(spec: WalkSpec, tol: float = 1e-12) -> bool:
    """Whether Gray-permuting the classical matrix gives the descending quantum one.

    Builds both matrices from the spec's thetas and verifies entrywise that
    ``Q_desc[a, b] == C[gray(a), gray(b)]``.
    """
    if spec.q != 1:
        raise ValueError(f"gray equivalence is a single-evolution property, got q={spec.q}")
    quantum = build_transition_matrix(
        replace(spec, kind=QUANTUM, order=DESCENDING)
    ).entries
    classical = build_transition_matrix(replace(spec, kind=CLASSICAL)).entries
    idx = np.arange(spec.nodes)
    gray = idx ^ (idx >> 1)
    conjugated = classical[np.ix_(gray, gray)]
    return bool(np.abs(quantum - conjugated).max() < tol)


def flip_bit_marginals(row0: np.ndarray, n: int) -> np.ndarray:
    """Per-bit flip probability implied by a flip-mask distribution."""
    masks = np.arange(row0.size)
    return np.array([row0[(masks >> l) & 1 == 1].sum() for l in range(n)])


def kron_reconstruction_error(tm: TransitionMatrix) -> float:
    """Distance from the nearest independent-bit (Kronecker product) matrix.

    Reconstructs the flip-mask distribution from its per-bit marginals; the
    result is exact when bits flip independently.
    """
    row0 = tm.flip_distribution()
    recon = _product_distribution(flip_bit_marginals(row0, tm.n))
    return float(np.abs(row0 - recon).max())


def is_factorisable(tm: TransitionMatrix, tol: float = 1e-12) -> bool:
    return kron_reconstruction_error(tm) < tol


def kron_split_residual(p: np.ndarray) -> float:
    """Rank-one residual of the (2 x 2) x (N/2 x N/2) Kronecker split.

    Rearranges the matrix so that an exact Kronecker product becomes a
    rank-one matrix; returns sigma_2 / sigma_1 of the rearrangement, which
    is 0 for factorisable matrices and order 1 for correlated ones.
    """
    p = np.asarray(p, dtype=float)
    size = p.shape[0]
    if size % 2 or p.shape != (size, size):
        raise ValueError(f"need a square even-sized matrix, got {p.shape}")
    half = size // 2
    r = p.reshape(2, half, 2, half).transpose(0, 2, 1, 3).reshape(4, half * half)
    sv = np.linalg.svd(r, compute_uv=False)
    return float(sv[1] / sv[0])
