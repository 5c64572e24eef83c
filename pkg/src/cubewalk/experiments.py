"""Convergence experiments: relative error of the estimator vs walk count.

For every sampling count in a schedule, the estimator is repeated over
independent runs and the relative error against the dense direct solution
is averaged. The CSV shape is ``n_s,mean_rel_error,std_rel_error,runs``.
Run streams are derived from (seed, component, schedule position, run), so
the table depends only on the seed and is byte-stable across thread counts.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .fileio import format_float
from .oracle import DenseSystem, direct_solve
from .solver import SolveConfig, estimate_component
from .system import LinearSystem

CSV_HEADER = "n_s,mean_rel_error,std_rel_error,runs"


@dataclass(frozen=True)
class ConvergencePoint:
    n_s: int
    mean_rel_error: float
    std_rel_error: float
    runs: int
    run_estimates: np.ndarray
    run_std_errors: np.ndarray


@dataclass(frozen=True)
class ConvergenceResult:
    component: int
    exact: float
    sampler: str
    points: tuple[ConvergencePoint, ...]

    def schedule(self) -> np.ndarray:
        return np.array([p.n_s for p in self.points])

    def mean_errors(self) -> np.ndarray:
        return np.array([p.mean_rel_error for p in self.points])


def _point_seed(seed: int, component: int, position: int) -> int:
    key = np.random.SeedSequence(entropy=seed, spawn_key=(component, position))
    return int(key.generate_state(1, dtype=np.uint64)[0])


def run_convergence(
    system: LinearSystem,
    component: int,
    schedule: list[int],
    *,
    c: int,
    seed: int,
    runs: int = 10,
    sampler: str | None = None,
    noise=None,
    threads: int = 1,
) -> ConvergenceResult:
    """Estimate the component at every schedule point, runs times each."""
    if not schedule:
        raise ValueError("schedule must not be empty")
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ValueError(f"schedule must be strictly increasing, got {schedule}")
    exact = float(direct_solve(DenseSystem(system.dense_a(), system.b))[component])
    if exact == 0.0:
        raise ValueError(f"component {component} of the exact solution is 0")
    points = []
    sampler_used = None
    for position, n_s in enumerate(schedule):
        cfg = SolveConfig(
            c=c,
            n_s=n_s,
            seed=_point_seed(seed, component, position),
            sampler=sampler,
            noise=noise,
            runs=runs,
            threads=threads,
        )
        result = estimate_component(component, system, cfg)
        sampler_used = result.sampler
        rel = np.abs(result.run_estimates - exact) / abs(exact)
        spread = float(rel.std(ddof=1)) if runs > 1 else 0.0
        points.append(
            ConvergencePoint(
                n_s=n_s,
                mean_rel_error=float(rel.mean()),
                std_rel_error=spread,
                runs=runs,
                run_estimates=result.run_estimates,
                run_std_errors=result.run_std_errors,
            )
        )
    return ConvergenceResult(
        component=component, exact=exact, sampler=sampler_used, points=tuple(points)
    )


def to_csv(result: ConvergenceResult) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for p in result.points:
        buf.write(
            f"{p.n_s},{format_float(p.mean_rel_error)},"
            f"{format_float(p.std_rel_error)},{p.runs}\n"
        )
    return buf.getvalue()


def fit_slope(result: ConvergenceResult) -> float:
    """Slope of log(mean relative error) against log(n_s)."""
    if len(result.points) < 2:
        raise ValueError("need at least two schedule points to fit a slope")
    x = np.log(result.schedule().astype(float))
    y = np.log(result.mean_errors())
    return float(np.polyfit(x, y, 1)[0])
