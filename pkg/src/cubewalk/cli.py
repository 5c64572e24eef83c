"""Command-line harness: generate systems, solve, benchmark, dump, validate.

Commands: ``gen``, ``solve``, ``converge``, ``matrix``, ``validate``.
Every flag has a config-file equivalent (``--config`` with ``key = value``
lines); explicit flags win over the file. Exit codes: 0 success, 1 usage,
2 validation failure, 3 I/O or parse error.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from .experiments import run_convergence, to_csv
from .fileio import (
    ParseError,
    read_config_path,
    read_system_path,
    system_to_text,
    write_matrix,
)
from .oracle import DenseSystem, SingularMatrixError, direct_solve
from .simulator import DEFAULT_READOUT_ERROR, NoiseModel
from .solver import (
    ConfigurationError,
    SolveConfig,
    error_floor,
    estimate_component,
    estimate_vector,
    plan_steps,
)
from .system import SpectralRadiusError, random_system
from .walks import (
    MAX_DENSE_BITS,
    CapacityError,
    build_transition_matrix,
    condition_number,
    is_factorisable,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_IO = 3

DEFAULT_SCHEDULE = "100,1000,10000,100000"
DEFAULT_EPSILON = 1e-4


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage problems, not argparse's 2
        raise _UsageError(f"{self.prog}: {message}")


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_plot(text: str):
    # config form: a boolean switches default-path plotting, anything else is a path
    try:
        return _parse_bool(text)
    except ValueError:
        return text


def _parse_schedule(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise _UsageError(f"bad sampling schedule {text!r}") from None
    if not values or any(v < 1 for v in values):
        raise _UsageError(f"sampling counts must be positive, got {text!r}")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise _UsageError(f"sampling schedule must be strictly increasing, got {text!r}")
    return values


def _load_config(args) -> dict[str, str]:
    path = getattr(args, "config", None)
    return read_config_path(path) if path else {}


def _merge(args, cfg: dict[str, str], key: str, default, cast):
    value = getattr(args, key)
    if value is not None:
        return value
    if key in cfg:
        try:
            return cast(cfg[key])
        except ValueError as exc:
            raise _UsageError(f"bad config value for {key}: {cfg[key]!r} ({exc})") from None
    return default


def _add_common_solve_flags(sub) -> None:
    sub.add_argument("system", help="system file produced by `gen`")
    sub.add_argument("--config", help="key = value file supplying flag defaults")
    sub.add_argument(
        "--component", default=None, help="component index I0; `solve` also takes 'all'"
    )
    sub.add_argument("--c", type=int, default=None, help="series truncation order")
    sub.add_argument(
        "--epsilon", type=float, default=None, help="target tail size; plans c when --c absent"
    )
    sub.add_argument(
        "--ns-schedule",
        dest="ns_schedule",
        default=None,
        help="comma-separated sampling counts",
    )
    sub.add_argument("--runs", type=int, default=None, help="independent repetitions")
    sub.add_argument(
        "--sampler",
        default=None,
        choices=["classical-bitflip", "quantum-simulated", "quantum-closed-form", "matrix-cdf"],
        help="walk sampler (default: pick by walk kind)",
    )
    sub.add_argument("--noise", action="store_true", default=None, help="enable readout noise")
    sub.add_argument(
        "--readout-error",
        dest="readout_error",
        type=float,
        default=None,
        help=f"per-bit readout flip rate (default {DEFAULT_READOUT_ERROR})",
    )
    sub.add_argument("--seed", type=int, default=None, help="master RNG seed")
    sub.add_argument("--threads", type=int, default=None, help="worker threads for walk blocks")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="cubewalk",
        description="Monte Carlo linear solver driven by walks on Hamming cubes",
    )
    commands = parser.add_subparsers(dest="command")

    gen = commands.add_parser("gen", help="generate a random system file")
    gen.add_argument("--config", help="key = value file supplying flag defaults")
    gen.add_argument("--seed", type=int, default=None, help="master RNG seed (required)")
    gen.add_argument("--n", type=int, default=None, help="bits per node (N = 2^n)")
    gen.add_argument("--q", type=int, default=None, help="evolutions per walk step")
    gen.add_argument("--gamma", type=float, default=None, help="series damping in (0, 1)")
    gen.add_argument("--kind", default=None, choices=["classical", "quantum"])
    gen.add_argument("--order", default=None, choices=["ascending", "descending"])
    gen.add_argument("--out", default=None, help="output path (default: stdout)")
    gen.set_defaults(func=cmd_gen)

    solve = commands.add_parser("solve", help="estimate one solution component")
    _add_common_solve_flags(solve)
    solve.set_defaults(func=cmd_solve)

    converge = commands.add_parser(
        "converge", help="relative error vs sampling count, as CSV (and figure)"
    )
    _add_common_solve_flags(converge)
    converge.add_argument("--out", default=None, help="CSV path (default: stdout)")
    converge.add_argument(
        "--plot",
        nargs="?",
        const=True,
        default=None,
        help="render a PNG figure (optional path; defaults to the CSV path with .png)",
    )
    converge.set_defaults(func=cmd_converge)

    matrix = commands.add_parser("matrix", help="dump the dense transition matrix")
    matrix.add_argument("system", help="system file produced by `gen`")
    matrix.add_argument("--config", help="key = value file supplying flag defaults")
    matrix.add_argument("--out", default=None, help="dump path (default: stdout)")
    matrix.set_defaults(func=cmd_matrix)

    validate = commands.add_parser("validate", help="run the structural check suite")
    validate.set_defaults(func=cmd_validate)

    return parser


# ---------------------------------------------------------------------------
# commands


def cmd_gen(args) -> int:
    cfg = _load_config(args)
    seed = _merge(args, cfg, "seed", None, int)
    if seed is None:
        raise _UsageError("gen requires --seed (or seed in the config file)")
    n = _merge(args, cfg, "n", 8, int)
    q = _merge(args, cfg, "q", 1, int)
    gamma = _merge(args, cfg, "gamma", 0.3, float)
    kind = _merge(args, cfg, "kind", "quantum", str)
    order = _merge(args, cfg, "order", "ascending", str)
    out = _merge(args, cfg, "out", None, str)

    system = random_system(seed, n, q=q, gamma=gamma, kind=kind, order=order)
    text = system_to_text(
        system, comment=f"cubewalk system: seed={seed} n={n} q={q} kind={kind}"
    )
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _parse_component(text: str):
    if text.strip().lower() == "all":
        return "all"
    try:
        return int(text)
    except ValueError:
        raise _UsageError(f"component must be an index or 'all', got {text!r}") from None


def _resolve_solve_config(
    args, cfg, system, default_runs: int
) -> tuple[SolveConfig, int | str, list[int]]:
    component = _merge(args, cfg, "component", 0, _parse_component)
    if isinstance(component, str) and component != "all":
        component = _parse_component(component)
    c = _merge(args, cfg, "c", None, int)
    epsilon = _merge(args, cfg, "epsilon", None, float)
    if c is None:
        c = plan_steps(system.gamma, epsilon if epsilon is not None else DEFAULT_EPSILON)
    schedule = _parse_schedule(_merge(args, cfg, "ns_schedule", DEFAULT_SCHEDULE, str))
    runs = _merge(args, cfg, "runs", default_runs, int)
    sampler = _merge(args, cfg, "sampler", None, str)
    noise_on = _merge(args, cfg, "noise", False, _parse_bool)
    readout = _merge(args, cfg, "readout_error", DEFAULT_READOUT_ERROR, float)
    seed = _merge(args, cfg, "seed", 0, int)
    threads = _merge(args, cfg, "threads", 1, int)
    noise = NoiseModel(readout) if noise_on else None
    config = SolveConfig(
        c=c,
        n_s=schedule[-1],
        seed=seed,
        sampler=sampler,
        noise=noise,
        runs=runs,
        threads=threads,
    )
    return config, component, schedule


def cmd_solve(args) -> int:
    cfg = _load_config(args)
    system = read_system_path(args.system)
    config, component, schedule = _resolve_solve_config(args, cfg, system, default_runs=1)
    if len(schedule) != 1:
        raise _UsageError("solve takes a single sampling count in --ns-schedule")
    exact_vector = None
    if system.n <= MAX_DENSE_BITS:
        exact_vector = direct_solve(DenseSystem(system.dense_a(), system.b))

    if component == "all":
        started = time.perf_counter()
        results = estimate_vector(system, config)
        elapsed = time.perf_counter() - started
        first = results[0]
        print(f"sampler       = {first.sampler}")
        print(f"c             = {config.c}")
        print(f"walks         = {first.walks} ({first.runs} runs x {first.n_s}) per component")
        for result in results:
            print(f"x[{result.component}] = {result.estimate:.12g}  (std_error {result.std_error:.3g})")
        estimates = np.array([r.estimate for r in results])
        print(f"norm_estimate = {float(np.linalg.norm(estimates)):.12g}")
        if exact_vector is not None:
            print(f"norm_exact    = {float(np.linalg.norm(exact_vector)):.12g}")
            print(f"max_abs_error = {np.abs(estimates - exact_vector).max():.6g}")
        print(f"wall_time_s   = {elapsed:.3f}")
        return EXIT_OK

    started = time.perf_counter()
    result = estimate_component(component, system, config)
    elapsed = time.perf_counter() - started
    print(f"component     = {component}")
    print(f"sampler       = {result.sampler}")
    print(f"c             = {config.c}")
    print(f"walks         = {result.walks} ({result.runs} runs x {result.n_s})")
    print(f"estimate      = {result.estimate:.12g}")
    print(f"std_error     = {result.std_error:.6g}")
    if exact_vector is not None:
        exact = float(exact_vector[component])
        print(f"exact         = {exact:.12g}")
        if exact != 0.0:
            print(f"rel_error     = {abs(result.estimate - exact) / abs(exact):.6g}")
        else:
            print("rel_error     = undefined (exact component is 0)")
    print(f"wall_time_s   = {elapsed:.3f}")
    return EXIT_OK


def cmd_converge(args) -> int:
    cfg = _load_config(args)
    system = read_system_path(args.system)
    config, component, schedule = _resolve_solve_config(args, cfg, system, default_runs=10)
    if component == "all":
        raise _UsageError("converge tracks a single component; pass an index")
    result = run_convergence(
        system,
        component,
        schedule,
        c=config.c,
        seed=config.seed,
        runs=config.runs,
        sampler=config.sampler,
        noise=config.noise,
        threads=config.threads,
    )
    csv_text = to_csv(result)
    out = _merge(args, cfg, "out", None, str)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)

    plot = _merge(args, cfg, "plot", None, _parse_plot)
    if plot is False:
        plot = None
    if plot is not None:
        if plot is True or plot == "":
            if not out:
                raise _UsageError("--plot without a path needs --out to derive one")
            plot = out.rsplit(".", 1)[0] + ".png"
        floor = None
        if config.noise is not None and system.n <= MAX_DENSE_BITS:
            kappa = condition_number(system.dense_a())
            floor = error_floor(kappa, config.noise.readout_error)
        from .figures import render_convergence  # matplotlib import is heavy

        render_convergence(
            result,
            plot,
            title=f"N={system.nodes}, c={config.c}, sampler={result.sampler}",
            floor=floor,
        )
    return EXIT_OK


def cmd_matrix(args) -> int:
    cfg = _load_config(args)
    system = read_system_path(args.system)
    if system.n > MAX_DENSE_BITS:
        raise CapacityError(f"matrix dump needs n <= {MAX_DENSE_BITS}, got {system.n}")
    tm = build_transition_matrix(system.walk)
    kappa = condition_number(system.dense_a())
    bound = (1.0 + system.gamma) / (1.0 - system.gamma)
    row_dev = float(np.abs(tm.entries.sum(axis=1) - 1.0).max())
    sym_dev = float(np.abs(tm.entries - tm.entries.T).max())
    verdict = "yes" if is_factorisable(tm) else "no"
    summary = [
        f"nodes = {tm.nodes}",
        f"bits = {tm.n}",
        f"kind = {system.walk.kind}",
        f"q = {system.walk.q}",
        f"condition_number = {kappa:.6g}",
        f"condition_bound = {bound:.6g}",
        f"row_sum_deviation = {row_dev:.3g}",
        f"symmetry_deviation = {sym_dev:.3g}",
        f"factorisable: {verdict}",
    ]
    out = _merge(args, cfg, "out", None, str)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            write_matrix(fh, tm)
        print("\n".join(summary))
    else:
        write_matrix(sys.stdout, tm)
        for line in summary:
            print(f"# {line}")
    return EXIT_OK


def cmd_validate(args) -> int:
    from .validate import run_all_checks

    results = run_all_checks()
    failed = 0
    for check in results:
        tag = "[PASS]" if check.passed else "[FAIL]"
        print(f"{tag} {check.name}: {check.detail}")
        failed += 0 if check.passed else 1
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_VALIDATION


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    if getattr(args, "func", None) is None:
        parser.print_help()
        return EXIT_USAGE
    try:
        return args.func(args)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CapacityError, SpectralRadiusError, SingularMatrixError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
