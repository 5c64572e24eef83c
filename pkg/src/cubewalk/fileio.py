"""Plain-text formats: system files, matrix dumps, and key=value configs.

System file layout (floats always carry 17 significant digits)::

    [walk]
    n = 2
    q = 1
    order = ascending
    kind = quantum
    <n lines: theta phi lambda>
    [system]
    gamma = 0.3
    [b]
    <N lines: one float each>

Blank lines and ``#`` comments are allowed anywhere. Parse failures report
the offending line number.
"""

from __future__ import annotations

import io
from typing import TextIO

import numpy as np

from .system import LinearSystem, build_system
from .walks import CoinParams, TransitionMatrix, WalkSpec


class ParseError(ValueError):
    """Malformed input file; carries the 1-based line number (0 = end of input)."""

    def __init__(self, line: int, message: str):
        where = f"line {line}" if line else "end of input"
        super().__init__(f"{where}: {message}")
        self.line = line


def format_float(x: float) -> str:
    return f"{x:.17g}"


# ---------------------------------------------------------------------------
# system files


def write_system(stream: TextIO, system: LinearSystem, comment: str | None = None) -> None:
    if system.walk is None:
        raise ValueError("only walk-backed systems have a file form")
    if system.weights is not None:
        raise ValueError("edge weights are not part of the file format")
    spec = system.walk
    if comment:
        stream.write(f"# {comment}\n")
    stream.write("[walk]\n")
    stream.write(f"n = {spec.n}\n")
    stream.write(f"q = {spec.q}\n")
    stream.write(f"order = {spec.order}\n")
    stream.write(f"kind = {spec.kind}\n")
    for coin in spec.coins:
        stream.write(
            f"{format_float(coin.theta)} {format_float(coin.phi)} {format_float(coin.lam)}\n"
        )
    stream.write("[system]\n")
    stream.write(f"gamma = {format_float(system.gamma)}\n")
    stream.write("[b]\n")
    for value in system.b:
        stream.write(f"{format_float(value)}\n")


def system_to_text(system: LinearSystem, comment: str | None = None) -> str:
    buf = io.StringIO()
    write_system(buf, system, comment)
    return buf.getvalue()


def _parse_key_value(text: str, lineno: int) -> tuple[str, str]:
    if "=" not in text:
        raise ParseError(lineno, f"expected 'key = value', got {text!r}")
    key, _, value = text.partition("=")
    return key.strip(), value.strip()


def _parse_float(text: str, lineno: int, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(lineno, f"bad {what}: {text!r}") from None


def _parse_int(text: str, lineno: int, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParseError(lineno, f"bad {what}: {text!r}") from None


def read_system(stream: TextIO) -> LinearSystem:
    """Parse a system file and build the (validated) system."""
    section = None
    walk_keys: dict[str, tuple[str, int]] = {}
    coin_rows: list[tuple[float, float, float]] = []
    gamma: float | None = None
    b_values: list[float] = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ParseError(lineno, f"unterminated section header {line!r}")
            section = line[1:-1].strip()
            if section not in ("walk", "system", "b"):
                raise ParseError(lineno, f"unknown section [{section}]")
            continue
        if section == "walk":
            if "=" in line:
                key, value = _parse_key_value(line, lineno)
                walk_keys[key] = (value, lineno)
            else:
                parts = line.split()
                if len(parts) != 3:
                    raise ParseError(lineno, f"coin line needs 3 angles, got {len(parts)}")
                coin_rows.append(
                    tuple(_parse_float(p, lineno, "coin angle") for p in parts)
                )
        elif section == "system":
            key, value = _parse_key_value(line, lineno)
            if key != "gamma":
                raise ParseError(lineno, f"unknown [system] key {key!r}")
            gamma = _parse_float(value, lineno, "gamma")
        elif section == "b":
            b_values.append(_parse_float(line, lineno, "b entry"))
        else:
            raise ParseError(lineno, f"content before any section: {line!r}")

    for key in ("n", "q", "order", "kind"):
        if key not in walk_keys:
            raise ParseError(0, f"missing [walk] key {key!r}")
    n = _parse_int(*walk_keys["n"], "n")
    q = _parse_int(*walk_keys["q"], "q")
    if len(coin_rows) != n:
        raise ParseError(0, f"expected {n} coin lines, got {len(coin_rows)}")
    if gamma is None:
        raise ParseError(0, "missing [system] gamma")
    if len(b_values) != (1 << n):
        raise ParseError(0, f"expected {1 << n} b entries, got {len(b_values)}")
    spec = WalkSpec(
        n=n,
        coins=tuple(CoinParams(*row) for row in coin_rows),
        q=q,
        order=walk_keys["order"][0],
        kind=walk_keys["kind"][0],
    )
    return build_system(spec, gamma, np.array(b_values))


def read_system_path(path: str) -> LinearSystem:
    with open(path, "r", encoding="utf-8") as fh:
        return read_system(fh)


# ---------------------------------------------------------------------------
# matrix dumps


def write_matrix(stream: TextIO, tm: TransitionMatrix) -> None:
    """First line ``N n``, then N rows of N floats, row-major."""
    stream.write(f"{tm.nodes} {tm.n}\n")
    for row in tm.entries:
        stream.write(" ".join(format_float(v) for v in row) + "\n")


def read_matrix(stream: TextIO) -> TransitionMatrix:
    header = stream.readline()
    parts = header.split()
    if len(parts) != 2:
        raise ParseError(1, f"expected 'N n' header, got {header!r}")
    nodes = _parse_int(parts[0], 1, "N")
    n = _parse_int(parts[1], 1, "n")
    if nodes != 1 << n:
        raise ParseError(1, f"header says N={nodes} but n={n}")
    rows = []
    for lineno in range(2, nodes + 2):
        line = stream.readline()
        values = line.split()
        if len(values) != nodes:
            raise ParseError(lineno, f"expected {nodes} entries, got {len(values)}")
        rows.append([_parse_float(v, lineno, "matrix entry") for v in values])
    return TransitionMatrix(n, np.array(rows))


# ---------------------------------------------------------------------------
# config files


def read_config(stream: TextIO) -> dict[str, str]:
    """key = value lines; keys are normalised to use underscores."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(stream, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, value = _parse_key_value(line, lineno)
        values[key.replace("-", "_")] = value
    return values


def read_config_path(path: str) -> dict[str, str]:
    with open(path, "r", encoding="utf-8") as fh:
        return read_config(fh)
