"""Statevector simulation of the single-coin walk circuit.

Register layout: basis index = ``coin_bit * 2**n + node``, so the coin is
the highest-index qubit and graph qubit ``k`` is bit ``k`` of the node
index. One evolution alternates a coin rotation with a CNOT from the coin
onto graph qubit ``k``, for ``k = 0..n-1`` (ascending) or ``n-1..0``
(descending). The coin is never measured or reset mid-walk: its amplitudes
carry over between the per-bit steps and between repeated evolutions, which
is exactly what correlates the bit flips.

A :class:`StateVector` is mutated in place by the gate functions and must
be confined to one thread; independent walks use independent instances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .walks import CapacityError, CoinParams, WalkSpec, u3_matrix

#: Hard cap on coin + graph qubits for the dense statevector.
MAX_QUBITS = 21

#: Per-bit readout flip rate used when noise is switched on without a value
#: (average readout error of a 20-qubit superconducting machine).
DEFAULT_READOUT_ERROR = 6.76e-2


@dataclass(frozen=True, slots=True)
class NoiseModel:
    """Independent per-bit classical flips applied to measured node bits."""

    readout_error: float = DEFAULT_READOUT_ERROR

    def __post_init__(self) -> None:
        if not 0.0 <= self.readout_error < 0.5:
            raise ValueError(
                f"readout error must be in [0, 0.5), got {self.readout_error}"
            )


class StateVector:
    """Dense complex amplitudes of the coin + graph register."""

    __slots__ = ("n", "amps")

    def __init__(self, n: int, amps: np.ndarray | None = None):
        if n < 1:
            raise ValueError(f"need at least one graph qubit, got n={n}")
        if n + 1 > MAX_QUBITS:
            raise CapacityError(f"statevector capped at {MAX_QUBITS} qubits, got {n + 1}")
        self.n = n
        if amps is None:
            amps = np.zeros(1 << (n + 1), dtype=complex)
            amps[0] = 1.0
        else:
            amps = np.asarray(amps, dtype=complex)
            if amps.shape != (1 << (n + 1),):
                raise ValueError(f"expected {1 << (n + 1)} amplitudes, got {amps.shape}")
        self.amps = amps

    @property
    def nodes(self) -> int:
        return 1 << self.n

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.amps.copy())


def init_state(j: int, n: int) -> StateVector:
    """Coin at 0, graph register at node ``j``."""
    if not 0 <= j < (1 << n):
        raise ValueError(f"node {j} out of range for {n} bits")
    state = StateVector(n)
    state.amps[0] = 0.0
    state.amps[j] = 1.0
    return state


def apply_u3_coin(state: StateVector, p: CoinParams) -> StateVector:
    """Rotate the coin qubit; unitary, applied in place."""
    u = u3_matrix(p)
    pair = state.amps.reshape(2, -1)
    top = u[0, 0] * pair[0] + u[0, 1] * pair[1]
    bottom = u[1, 0] * pair[0] + u[1, 1] * pair[1]
    pair[0] = top
    pair[1] = bottom
    return state


def apply_cnot_coin_to(state: StateVector, k: int) -> StateVector:
    """Flip graph bit ``k`` on the coin=1 branch; applied in place."""
    n = state.n
    if not 0 <= k < n:
        raise ValueError(f"graph qubit {k} out of range for n={n}")
    half = state.amps[state.nodes :]
    swapped = half.reshape(1 << (n - 1 - k), 2, 1 << k)[:, ::-1, :]
    state.amps[state.nodes :] = swapped.reshape(-1)  # reversed view copies here
    return state


def apply_evolution(state: StateVector, spec: WalkSpec) -> StateVector:
    """One full evolution: (coin rotation, CNOT) for every graph qubit in order."""
    if spec.n != state.n:
        raise ValueError(f"spec has n={spec.n}, state has n={state.n}")
    ks = range(spec.n) if spec.order == "ascending" else range(spec.n - 1, -1, -1)
    for k in ks:
        apply_u3_coin(state, spec.coins[k])
        apply_cnot_coin_to(state, k)
    return state


def walk_state(j: int, spec: WalkSpec) -> StateVector:
    """State after the spec's q evolutions from node ``j`` (coin carried over)."""
    state = init_state(j, spec.n)
    for _ in range(spec.q):
        apply_evolution(state, spec)
    return state


def graph_marginal(state: StateVector) -> np.ndarray:
    """Probability of each node after tracing out the coin qubit."""
    return (np.abs(state.amps.reshape(2, -1)) ** 2).sum(axis=0)


def walk_marginal(j: int, spec: WalkSpec) -> np.ndarray:
    """Node distribution one walk step (q evolutions) away from ``j``."""
    return graph_marginal(walk_state(j, spec))


def _readout_mask(n: int, error: float, rng: np.random.Generator) -> int:
    flips = rng.random(n) < error
    return int((flips.astype(np.int64) << np.arange(n)).sum())


def sample_step(
    j: int,
    spec: WalkSpec,
    rng: np.random.Generator,
    noise: NoiseModel | None = None,
) -> int:
    """Run the circuit from ``j``, measure the graph register, discard the coin.

    Sampling draws from the exact marginal by inverse CDF, which is
    statistically identical to a projective measurement. With noise, every
    measured bit is flipped independently with the readout error rate; the
    noisy node is what a hardware feedback loop would see.
    """
    probs = walk_marginal(j, spec)
    cdf = np.cumsum(probs)
    node = int(np.searchsorted(cdf, rng.random(), side="right"))
    node = min(node, spec.nodes - 1)
    if noise is not None and noise.readout_error > 0.0:
        node ^= _readout_mask(spec.n, noise.readout_error, rng)
    return node
