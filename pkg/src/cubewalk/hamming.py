"""Bit-string encodings of graph nodes on the Hamming cube.

Nodes are integers in ``[0, 2**n)`` read as n-bit strings, with bit ``l`` of
the integer being the l-th coordinate (bit 0 is the rightmost). The rest of
the package keeps nodes as plain machine integers or numpy integer arrays
under the same convention; :class:`NodeState` is the width-checked scalar
form used by the operations below.
"""

from __future__ import annotations

from dataclasses import dataclass

ASCENDING = "ascending"
DESCENDING = "descending"


@dataclass(frozen=True, slots=True)
class NodeState:
    """A node index together with its bit-width on the cube."""

    index: int
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"bit-width must be >= 1, got {self.n}")
        if not 0 <= self.index < (1 << self.n):
            raise ValueError(f"index {self.index} out of range for {self.n} bits")

    def bit(self, l: int) -> int:
        return (self.index >> l) & 1


def xor(a: NodeState, b: NodeState) -> NodeState:
    """Bitwise XOR of two equal-width nodes (translation on the cube)."""
    if a.n != b.n:
        raise ValueError(f"bit-width mismatch: {a.n} != {b.n}")
    return NodeState(a.index ^ b.index, a.n)


def classical_distance(i: NodeState) -> int:
    """Hamming weight of the node: how many independent bit flips it encodes."""
    return i.index.bit_count()


def quantum_distance(i: NodeState, order: str = ASCENDING) -> int:
    """Number of adjacent-bit transitions in the zero-padded bit string.

    The single-coin walk correlates neighbouring bits, so its natural metric
    counts transitions between adjacent bits rather than set bits. Ascending
    order pads a zero below bit 0; descending order pads a zero above bit
    n-1. The descending metric equals the Hamming weight of
    ``gray_encode(i)``.
    """
    if order == ASCENDING:
        return ((i.index ^ (i.index << 1)) & ((1 << i.n) - 1)).bit_count()
    if order == DESCENDING:
        return (i.index ^ (i.index >> 1)).bit_count()
    raise ValueError(f"order must be {ASCENDING!r} or {DESCENDING!r}, got {order!r}")


def gray_encode(b: NodeState) -> NodeState:
    """Map to the reflected Gray code (consecutive integers one bit apart)."""
    return NodeState(b.index ^ (b.index >> 1), b.n)


def gray_decode(g: NodeState) -> NodeState:
    """Inverse of :func:`gray_encode` by prefix XOR from the top bit down."""
    x = g.index
    shift = 1
    while shift < g.n:
        x ^= x >> shift
        shift <<= 1
    return NodeState(x, g.n)
