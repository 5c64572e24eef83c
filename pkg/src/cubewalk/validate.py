"""Self-check suite behind the ``validate`` CLI command.

Each check exercises one structural property of the walk machinery:
Gray-code equivalence between the descending quantum walk and the classical
walk, agreement of the statevector circuit with the closed-form matrices,
phase (in)dependence, stochasticity, and Kronecker structure. Checks are
deterministic (internally seeded) and cheap enough to run on every build.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hamming import ASCENDING, DESCENDING
from .simulator import StateVector, apply_cnot_coin_to, apply_u3_coin, walk_marginal
from .walks import (
    CLASSICAL,
    QUANTUM,
    CoinParams,
    WalkSpec,
    build_transition_matrix,
    check_gray_equivalence,
    is_factorisable,
    kron_reconstruction_error,
    kron_split_residual,
)

_SEED = 0x5EED


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _rng() -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(_SEED)))


def _random_coins(rng, n, with_phases=False) -> tuple[CoinParams, ...]:
    thetas = rng.uniform(0.0, math.pi, n)
    phis = rng.uniform(0.0, math.pi, n) if with_phases else np.zeros(n)
    lams = rng.uniform(0.0, math.pi, n) if with_phases else np.zeros(n)
    return tuple(CoinParams(t, p, l) for t, p, l in zip(thetas, phis, lams))


def four_node_two_step_reference(theta0: float, theta1: float) -> np.ndarray:
    """Independent closed-form flip-mask row for two evolutions on four nodes."""
    c0, s0 = math.cos(theta0), math.sin(theta0)
    c1, s1 = math.cos(theta1), math.sin(theta1)
    stay = 0.25 * s0**2 + 0.125 * (
        1.0 + c1**2 + c0**2 + 4.0 * c1 * c0 + c1**2 * c0**2 - s1**2 * s0**2
    )
    both = 0.25 * (1.0 - 2.0 * c1 * c0 + c1**2)
    return np.array([stay, 0.25 * s1**2, 0.25 * s1**2, both])


# ---------------------------------------------------------------------------
# individual checks


def _check_gray_equivalence() -> CheckResult:
    rng = _rng()
    worst = None
    for n in range(1, 7):
        for _ in range(20):
            spec = WalkSpec(n=n, coins=_random_coins(rng, n), q=1, kind=QUANTUM)
            if not check_gray_equivalence(spec):
                return CheckResult(
                    "gray-permuted classical equals descending quantum (n<=6)",
                    False,
                    f"mismatch at n={n}",
                )
        worst = n
    return CheckResult(
        "gray-permuted classical equals descending quantum (n<=6)",
        True,
        f"20 random angle sets per n up to n={worst}",
    )


def _check_four_node_permutation() -> CheckResult:
    rng = _rng()
    perm = np.array([0, 3, 2, 1])
    dev = 0.0
    for _ in range(20):
        coins = _random_coins(rng, 2)
        quantum = build_transition_matrix(WalkSpec(2, coins, kind=QUANTUM)).entries
        classical = build_transition_matrix(WalkSpec(2, coins, kind=CLASSICAL)).entries
        dev = max(dev, np.abs(quantum[np.ix_(perm, perm)] - classical).max())
    return CheckResult(
        "four-node ascending quantum is the (0 3 2 1)-permuted classical",
        dev < 1e-12,
        f"max deviation {dev:.2e}",
    )


def _check_simulator_matches_closed_forms() -> CheckResult:
    rng = _rng()
    dev = 0.0
    for n in range(1, 5):
        for q in (1, 2):
            for order in (ASCENDING, DESCENDING):
                spec = WalkSpec(
                    n, _random_coins(rng, n, with_phases=True), q=q, order=order
                )
                matrix = build_transition_matrix(spec).entries
                for j in (0, int(rng.integers(spec.nodes))):
                    dev = max(dev, np.abs(walk_marginal(j, spec) - matrix[j]).max())
    return CheckResult(
        "statevector marginals match closed-form rows (n<=4, q<=2)",
        dev < 1e-10,
        f"max deviation {dev:.2e}",
    )


def _check_single_evolution_phase_free() -> CheckResult:
    rng = _rng()
    thetas = rng.uniform(0.0, math.pi, 3)
    base = None
    dev = 0.0
    for _ in range(30):
        coins = tuple(
            CoinParams(t, rng.uniform(-math.pi, math.pi), rng.uniform(-math.pi, math.pi))
            for t in thetas
        )
        row = walk_marginal(0, WalkSpec(3, coins, q=1))
        if base is None:
            base = row
        dev = max(dev, np.abs(row - base).max())
    return CheckResult(
        "single-evolution marginal ignores phi and lambda",
        dev < 1e-12,
        f"max deviation over 30 phase draws {dev:.2e}",
    )


def _check_four_node_two_step_reference() -> CheckResult:
    rng = _rng()
    dev = 0.0
    phase_dev = 0.0
    for _ in range(50):
        t0, t1 = rng.uniform(0.0, math.pi, 2)
        reference = four_node_two_step_reference(t0, t1)
        base = None
        for _ in range(4):
            coins = (
                CoinParams(t0, rng.uniform(0, math.pi), rng.uniform(0, math.pi)),
                CoinParams(t1, rng.uniform(0, math.pi), rng.uniform(0, math.pi)),
            )
            row = build_transition_matrix(WalkSpec(2, coins, q=2)).flip_distribution()
            dev = max(dev, np.abs(row - reference).max())
            if base is None:
                base = row
            phase_dev = max(phase_dev, np.abs(row - base).max())
    passed = dev < 1e-12 and phase_dev < 1e-12
    return CheckResult(
        "four-node two-evolution row matches its closed form, phase-free",
        passed,
        f"formula deviation {dev:.2e}, phase spread {phase_dev:.2e}",
    )


def _check_eight_node_phase_sensitivity() -> CheckResult:
    rng = _rng()
    thetas = rng.uniform(0.2, math.pi - 0.2, 3)
    rows = []
    for _ in range(16):
        coins = tuple(CoinParams(t, rng.uniform(0, math.pi), 0.0) for t in thetas)
        rows.append(build_transition_matrix(WalkSpec(3, coins, q=2)).flip_distribution())
    spread = (np.max(rows, axis=0) - np.min(rows, axis=0)).max()
    return CheckResult(
        "eight-node two-evolution row depends on phases",
        spread > 1e-6,
        f"max entry spread over phi draws {spread:.2e}",
    )


def _check_stochastic_structure() -> CheckResult:
    rng = _rng()
    worst_row = 0.0
    worst_sym = 0.0
    worst_neg = 0.0
    for kind in (CLASSICAL, QUANTUM):
        for q in (1, 2):
            for order in (ASCENDING, DESCENDING):
                spec = WalkSpec(
                    4, _random_coins(rng, 4, with_phases=True), q=q, order=order, kind=kind
                )
                p = build_transition_matrix(spec).entries
                worst_row = max(worst_row, np.abs(p.sum(axis=1) - 1.0).max())
                worst_sym = max(worst_sym, np.abs(p - p.T).max())
                worst_neg = max(worst_neg, float(-p.min()))
    passed = worst_row < 1e-9 and worst_sym < 1e-12 and worst_neg < 1e-12
    return CheckResult(
        "built matrices are stochastic, symmetric, nonnegative",
        passed,
        f"row-sum dev {worst_row:.2e}, asymmetry {worst_sym:.2e}, negativity {worst_neg:.2e}",
    )


def _check_two_step_classical_square() -> CheckResult:
    rng = _rng()
    dev = 0.0
    for n in (2, 4, 6):
        coins = _random_coins(rng, n)
        one = build_transition_matrix(WalkSpec(n, coins, q=1, kind=CLASSICAL)).entries
        two = build_transition_matrix(WalkSpec(n, coins, q=2, kind=CLASSICAL)).entries
        dev = max(dev, np.abs(two - one @ one).max())
    return CheckResult(
        "two-step classical matrix equals the square of the one-step matrix",
        dev < 1e-12,
        f"max deviation {dev:.2e}",
    )


def _check_kronecker_structure() -> CheckResult:
    rng = _rng()
    worst_classical = 0.0
    for q in (1, 2):
        spec = WalkSpec(4, _random_coins(rng, 4), q=q, kind=CLASSICAL)
        worst_classical = max(
            worst_classical, kron_reconstruction_error(build_transition_matrix(spec))
        )
    third = math.pi / 3.0
    quantum = build_transition_matrix(
        WalkSpec(2, (CoinParams(third), CoinParams(third)), q=1, kind=QUANTUM)
    )
    residual = kron_split_residual(quantum.entries)
    passed = worst_classical < 1e-12 and residual > 1e-6 and not is_factorisable(quantum)
    return CheckResult(
        "classical matrices factorise; generic quantum ones do not",
        passed,
        f"classical reconstruction {worst_classical:.2e}, quantum rank residual {residual:.2e}",
    )


def _check_norm_preservation() -> CheckResult:
    rng = _rng()
    state = StateVector(3)
    for _ in range(10_000):
        coin = CoinParams(*rng.uniform(-math.pi, math.pi, 3))
        apply_u3_coin(state, coin)
        apply_cnot_coin_to(state, int(rng.integers(3)))
    drift = abs(state.norm() - 1.0)
    return CheckResult(
        "statevector norm preserved over 10^4 gates",
        drift < 1e-10,
        f"norm drift {drift:.2e}",
    )


def run_all_checks() -> list[CheckResult]:
    return [
        _check_gray_equivalence(),
        _check_four_node_permutation(),
        _check_simulator_matches_closed_forms(),
        _check_single_evolution_phase_free(),
        _check_four_node_two_step_reference(),
        _check_eight_node_phase_sensitivity(),
        _check_stochastic_structure(),
        _check_two_step_classical_square(),
        _check_kronecker_structure(),
        _check_norm_preservation(),
    ]
