"""Monte Carlo estimation of solution components by sampled walks.

Component ``I0`` of the truncated series solution is estimated by ``n_s``
independent walks of ``c`` steps: a walk visits ``I_0 -> I_1 -> ... -> I_c``
and contributes ``sum_s gamma^s * b[I_s]`` (with the running product of edge
weights replacing the gamma powers for weighted systems). The sample mean is
an unbiased estimator of the truncated series because the expectation over
walk paths reproduces the nested transition sums.

Walk-backed sampling never touches an O(N) distribution per step: the
classical sampler flips each bit independently, and the quantum samplers
draw a flip mask from the one-row marginal of the circuit, which covers
every start node by translation invariance. Readout noise flips each
measured bit after a step; the noisy node feeds both the b-lookup and the
next step, as a hardware feedback loop would.

Reproducibility: walks are grouped into fixed-size blocks and the RNG
stream of each block is derived counter-based from
``(seed, component, run, block)``. Block results are merged in block order,
so estimates depend only on the seed and the walk count, never on the
thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .simulator import NoiseModel, walk_marginal
from .system import LinearSystem
from .walks import CLASSICAL, QUANTUM, WalkSpec, flip_distribution

CLASSICAL_BITFLIP = "classical-bitflip"
QUANTUM_SIMULATED = "quantum-simulated"
QUANTUM_CLOSED_FORM = "quantum-closed-form"
MATRIX_CDF = "matrix-cdf"

SAMPLERS = (CLASSICAL_BITFLIP, QUANTUM_SIMULATED, QUANTUM_CLOSED_FORM, MATRIX_CDF)

#: Walks per RNG block; fixed so that streams depend only on walk index.
BLOCK_WALKS = 4096

MAX_VECTOR_NODES = 1 << 20


class ConfigurationError(ValueError):
    """Sampler, spec, and config do not fit together."""


@dataclass(frozen=True, slots=True)
class SolveConfig:
    """How to run the estimator: truncation, walk count, seed, sampler, noise."""

    c: int
    n_s: int
    seed: int
    sampler: str | None = None
    noise: NoiseModel | None = None
    runs: int = 1
    threads: int = 1

    def __post_init__(self) -> None:
        if self.c < 0:
            raise ValueError(f"truncation order must be >= 0, got {self.c}")
        if self.n_s < 1:
            raise ValueError(f"need at least one walk, got n_s={self.n_s}")
        if self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs}")
        if self.threads < 1:
            raise ValueError(f"threads must be >= 1, got {self.threads}")
        if self.seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.seed}")
        if self.sampler is not None and self.sampler not in SAMPLERS:
            raise ConfigurationError(
                f"unknown sampler {self.sampler!r}; choose from {SAMPLERS}"
            )


@dataclass(frozen=True)
class EstimateResult:
    """One component estimate with per-run statistics and seed provenance."""

    component: int
    estimate: float
    std_error: float
    run_estimates: np.ndarray
    run_std_errors: np.ndarray
    n_s: int
    runs: int
    walks: int
    seed: int
    sampler: str


def plan_steps(gamma: float, epsilon: float) -> int:
    """Truncation order needed for a series tail of size epsilon."""
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must be in (0, 1), got {gamma}")
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    # ceil with a nudge so that epsilon == gamma**k returns exactly k
    return max(0, math.ceil(math.log(epsilon) / math.log(gamma) - 1e-9))


def relative_error(estimate: float, exact: float) -> float:
    """|estimate - exact| / |exact|."""
    if exact == 0.0:
        raise ValueError("relative error undefined for exact == 0")
    return abs(estimate - exact) / abs(exact)


def error_floor(kappa: float, readout_error: float) -> float:
    """Hardware accuracy floor: condition number times readout error."""
    if kappa < 1.0:
        raise ValueError(f"condition number must be >= 1, got {kappa}")
    if readout_error < 0.0:
        raise ValueError(f"readout error must be >= 0, got {readout_error}")
    return kappa * readout_error


def sample_classical_step(j: int, spec: WalkSpec, rng: np.random.Generator) -> int:
    """One evolution of the bit-flip walk; O(n), no O(N) distribution built."""
    if spec.kind != CLASSICAL:
        raise ConfigurationError(f"classical step needs a classical spec, got {spec.kind!r}")
    if not 0 <= j < spec.nodes:
        raise ValueError(f"node {j} out of range for {spec.n} bits")
    flips = rng.random(spec.n) < np.sin(spec.thetas() / 2.0) ** 2
    return j ^ int((flips.astype(np.int64) << np.arange(spec.n)).sum())


# ---------------------------------------------------------------------------
# step kernels (vectorised over walks)


class _BitFlipKernel:
    """q rounds of independent per-bit flips per walk step."""

    def __init__(self, spec: WalkSpec):
        self.n = spec.n
        self.rounds = spec.q
        self.flip = np.sin(spec.thetas() / 2.0) ** 2
        self.pow2 = (1 << np.arange(spec.n)).astype(np.int64)
        self.draws_per_step = spec.q * spec.n

    def step(self, nodes: np.ndarray, u: np.ndarray) -> np.ndarray:
        per_round = u.reshape(nodes.shape[0], self.rounds, self.n)
        for r in range(self.rounds):
            masks = ((per_round[:, r, :] < self.flip) * self.pow2).sum(axis=1)
            nodes = nodes ^ masks
        return nodes


class _FlipMaskKernel:
    """Inverse-CDF draw of a flip mask from a translation-invariant row."""

    draws_per_step = 1

    def __init__(self, row0: np.ndarray):
        self.cdf = np.cumsum(row0)
        self.limit = row0.size - 1

    def step(self, nodes: np.ndarray, u: np.ndarray) -> np.ndarray:
        masks = np.minimum(
            np.searchsorted(self.cdf, u[:, 0], side="right"), self.limit
        )
        return nodes ^ masks


class _MatrixRowKernel:
    """Inverse-CDF draw per current node from an explicit matrix's rows."""

    draws_per_step = 1

    def __init__(self, entries: np.ndarray):
        self.cdfs = np.cumsum(entries, axis=1)
        self.limit = entries.shape[0] - 1

    def step(self, nodes: np.ndarray, u: np.ndarray) -> np.ndarray:
        out = np.empty_like(nodes)
        draws = u[:, 0]
        for value in np.unique(nodes):
            sel = nodes == value
            out[sel] = np.searchsorted(self.cdfs[value], draws[sel], side="right")
        return np.minimum(out, self.limit)


def resolve_sampler(system: LinearSystem, sampler: str | None) -> str:
    """Pick or validate the sampler for a system."""
    if sampler is None:
        if system.walk is None:
            return MATRIX_CDF
        return CLASSICAL_BITFLIP if system.walk.kind == CLASSICAL else QUANTUM_SIMULATED
    if sampler not in SAMPLERS:
        raise ConfigurationError(f"unknown sampler {sampler!r}; choose from {SAMPLERS}")
    if sampler == MATRIX_CDF:
        if system.matrix is None:
            raise ConfigurationError("matrix-cdf sampling needs an explicit matrix system")
        return sampler
    if system.walk is None:
        raise ConfigurationError(f"{sampler} needs a walk-backed system")
    if sampler == CLASSICAL_BITFLIP and system.walk.kind != CLASSICAL:
        raise ConfigurationError("classical-bitflip sampling needs a classical walk")
    if sampler != CLASSICAL_BITFLIP and system.walk.kind != QUANTUM:
        raise ConfigurationError(f"{sampler} needs a quantum walk")
    if sampler == QUANTUM_CLOSED_FORM and system.walk.q > 2:
        raise ConfigurationError(
            "no closed form beyond two evolutions; use quantum-simulated"
        )
    return sampler


def _make_kernel(system: LinearSystem, sampler: str):
    if sampler == CLASSICAL_BITFLIP:
        return _BitFlipKernel(system.walk)
    if sampler == QUANTUM_SIMULATED:
        return _FlipMaskKernel(walk_marginal(0, system.walk))
    if sampler == QUANTUM_CLOSED_FORM:
        return _FlipMaskKernel(flip_distribution(system.walk))
    return _MatrixRowKernel(system.matrix.entries)


# ---------------------------------------------------------------------------
# walk execution


@dataclass(frozen=True)
class _WalkPlan:
    start: int
    c: int
    n: int
    nodes: int
    b: np.ndarray
    gamma_powers: np.ndarray
    weights: np.ndarray | None
    noise_p: float  # negative when noise is off
    noise_bits: int  # draws reserved per step for readout flips
    draws_per_walk: int


def _build_plan(component: int, system: LinearSystem, cfg: SolveConfig, kernel) -> _WalkPlan:
    if not 0 <= component < system.nodes:
        raise ValueError(f"component {component} out of range for {system.nodes} nodes")
    noise_on = cfg.noise is not None
    noise_bits = system.n if noise_on else 0
    return _WalkPlan(
        start=component,
        c=cfg.c,
        n=system.n,
        nodes=system.nodes,
        b=system.b,
        gamma_powers=system.gamma ** np.arange(cfg.c + 1),
        weights=system.weights,
        noise_p=cfg.noise.readout_error if noise_on else -1.0,
        noise_bits=noise_bits,
        draws_per_walk=cfg.c * (kernel.draws_per_step + noise_bits),
    )


def _walk_block(plan: _WalkPlan, kernel, rng: np.random.Generator, size: int):
    # contributions are centered on the deterministic s=0 term b[start]:
    # the shift is added back at the end and keeps the variance exact
    u = rng.random((size, plan.draws_per_walk))
    pow2 = (1 << np.arange(plan.n)).astype(np.int64)
    nodes = np.full(size, plan.start, dtype=np.int64)
    contrib = np.zeros(size)
    running = np.ones(size) if plan.weights is not None else None
    col = 0
    for s in range(1, plan.c + 1):
        du = u[:, col : col + kernel.draws_per_step]
        col += kernel.draws_per_step
        previous = nodes
        nodes = kernel.step(nodes, du)
        if plan.noise_bits:
            nu = u[:, col : col + plan.noise_bits]
            col += plan.noise_bits
            flips = (nu < plan.noise_p) * pow2
            nodes = nodes ^ flips.sum(axis=1)
        if running is None:
            contrib += plan.gamma_powers[s] * plan.b[nodes]
        else:
            running = running * plan.weights[previous, nodes]
            contrib += running * plan.b[nodes]
    return float(contrib.sum()), float(contrib @ contrib)


def _block_sizes(n_s: int) -> list[int]:
    full, rest = divmod(n_s, BLOCK_WALKS)
    return [BLOCK_WALKS] * full + ([rest] if rest else [])


def _block_rng(seed: int, component: int, run: int, block: int) -> np.random.Generator:
    key = np.random.SeedSequence(entropy=seed, spawn_key=(component, run, block))
    return np.random.Generator(np.random.Philox(key))


def _run_walks(plan, kernel, cfg: SolveConfig, component: int, run: int):
    sizes = _block_sizes(cfg.n_s)

    def job(block: int) -> tuple[float, float]:
        rng = _block_rng(cfg.seed, component, run, block)
        return _walk_block(plan, kernel, rng, sizes[block])

    if cfg.threads == 1 or len(sizes) == 1:
        parts = [job(i) for i in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            parts = list(pool.map(job, range(len(sizes))))
    # merge in block order so results are independent of thread count
    total = 0.0
    total_sq = 0.0
    for part_sum, part_sq in parts:
        total += part_sum
        total_sq += part_sq
    return total, total_sq


def _mean_and_se(total: float, total_sq: float, count: int) -> tuple[float, float]:
    mean = total / count
    if count < 2:
        return mean, 0.0
    var = max(total_sq - total * total / count, 0.0) / (count - 1)
    return mean, math.sqrt(var / count)


def estimate_component(
    component: int, system: LinearSystem, cfg: SolveConfig
) -> EstimateResult:
    """Estimate one solution component by cfg.runs batches of cfg.n_s walks."""
    sampler = resolve_sampler(system, cfg.sampler)
    kernel = _make_kernel(system, sampler)
    plan = _build_plan(component, system, cfg, kernel)
    shift = float(system.b[component])  # the exact s=0 term of every walk
    run_estimates = np.empty(cfg.runs)
    run_std_errors = np.empty(cfg.runs)
    total = 0.0
    total_sq = 0.0
    for run in range(cfg.runs):
        run_sum, run_sq = _run_walks(plan, kernel, cfg, component, run)
        mean, run_std_errors[run] = _mean_and_se(run_sum, run_sq, cfg.n_s)
        run_estimates[run] = shift + mean
        total += run_sum
        total_sq += run_sq
    walks = cfg.runs * cfg.n_s
    mean, std_error = _mean_and_se(total, total_sq, walks)
    estimate = shift + mean
    return EstimateResult(
        component=component,
        estimate=estimate,
        std_error=std_error,
        run_estimates=run_estimates,
        run_std_errors=run_std_errors,
        n_s=cfg.n_s,
        runs=cfg.runs,
        walks=walks,
        seed=cfg.seed,
        sampler=sampler,
    )


def estimate_vector(system: LinearSystem, cfg: SolveConfig) -> list[EstimateResult]:
    """Estimate every component; RNG streams are disjoint per component."""
    if system.nodes > MAX_VECTOR_NODES:
        raise ValueError(f"vector estimation capped at {MAX_VECTOR_NODES} nodes")
    return [estimate_component(i, system, cfg) for i in range(system.nodes)]
