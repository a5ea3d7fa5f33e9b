"""Sink, Equality, the XOR lift, and edge-projection helpers.

Tournament inputs are bit strings over the ``C(m, 2)`` edges ``(i, j)``,
``1 <= i < j <= m``, in lexicographic order. Bit ``z_ij = 1`` orients the edge
``v_i -> v_j``. Vertices are numbered from 1. When a bit string is packed
into an integer the first coordinate is the most significant bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Callable

import numpy as np

__all__ = [
    "BooleanFunction",
    "EdgeIndexing",
    "edges",
    "sink",
    "z_string",
    "project",
    "sink_xor",
    "eq",
    "function_from_name",
    "bits_to_int",
    "int_to_bits",
]


def bits_to_int(bits) -> int:
    v = 0
    for b in bits:
        v = (v << 1) | int(b)
    return v


def int_to_bits(value: int, width: int) -> tuple[int, ...]:
    return tuple((int(value) >> (width - 1 - k)) & 1 for k in range(width))


@lru_cache(maxsize=None)
def edges(m: int) -> tuple[tuple[int, int], ...]:
    if m < 2:
        raise ValueError(f"need at least 2 vertices, got {m}")
    return tuple(combinations(range(1, m + 1), 2))


@dataclass(frozen=True)
class EdgeIndexing:
    m: int

    def __post_init__(self):
        if self.m < 3:
            raise ValueError(f"m must be >= 3, got {self.m}")

    @property
    def n_edges(self) -> int:
        return self.m * (self.m - 1) // 2

    def position(self, i: int, j: int) -> int:
        if i > j:
            i, j = j, i
        if not 1 <= i < j <= self.m:
            raise ValueError(f"no edge ({i}, {j}) for m={self.m}")
        return edges(self.m).index((i, j))

    def incident(self, i: int) -> tuple[int, ...]:
        """Positions of the edges at ``v_i`` (the set E_{v_i}), ascending."""
        if not 1 <= i <= self.m:
            raise ValueError(f"vertex {i} out of range 1..{self.m}")
        return tuple(p for p, e in enumerate(edges(self.m)) if i in e)


def _check_len(m: int, w) -> np.ndarray:
    w = np.asarray(w, dtype=np.int64)
    n = m * (m - 1) // 2
    if w.shape[-1] != n:
        raise ValueError(f"Sink on m={m} needs {n} bits, got {w.shape[-1]}")
    return w


def z_string(m: int, i: int) -> tuple[int, ...]:
    """The pattern on E_{v_i} that makes ``v_i`` a sink."""
    idx = EdgeIndexing(m)
    incident = idx.incident(i)
    return tuple(1 if edges(m)[p][1] == i else 0 for p in incident)


def project(m: int, w, i: int) -> tuple[int, ...]:
    w = _check_len(m, w)
    return tuple(int(w[p]) for p in EdgeIndexing(m).incident(i))


def sink(m: int, w) -> int:
    """1 iff the tournament ``w`` has a vertex with every edge incoming."""
    w = _check_len(m, w)
    return int(_sink_bits(m, w[None, :])[0])


def _sink_bits(m: int, w: np.ndarray) -> np.ndarray:
    # w: (..., C(m,2)) array of bits
    out = np.zeros(w.shape[:-1], dtype=np.int64)
    for i in range(1, m + 1):
        inc = EdgeIndexing(m).incident(i)
        z = np.array(z_string(m, i))
        out |= np.all(w[..., list(inc)] == z, axis=-1)
    return out


def _unpack(values: np.ndarray, width: int) -> np.ndarray:
    shifts = np.arange(width - 1, -1, -1)
    return (np.asarray(values, dtype=np.int64)[..., None] >> shifts) & 1


@dataclass(frozen=True)
class BooleanFunction:
    """Total function on ``{0,1}^x_bits x {0,1}^y_bits``.

    ``evaluate`` takes integer (or integer-array) encodings of both inputs.
    """

    name: str
    x_bits: int
    y_bits: int
    evaluate: Callable[[np.ndarray, np.ndarray], np.ndarray]

    def __call__(self, x, y):
        x, y = np.asarray(x), np.asarray(y)
        if np.any((x < 0) | (x >= 1 << self.x_bits)) or np.any((y < 0) | (y >= 1 << self.y_bits)):
            raise ValueError(f"input out of range for {self.name}")
        r = self.evaluate(x, y)
        return int(r) if np.ndim(r) == 0 else r

    def truth_table(self) -> np.ndarray:
        """Matrix M_F; debug view for small inputs only."""
        if self.x_bits + self.y_bits > 14:
            raise ValueError("truth table too large to materialize")
        x, y = np.meshgrid(np.arange(1 << self.x_bits), np.arange(1 << self.y_bits), indexing="ij")
        return np.asarray(self.evaluate(x, y), dtype=np.int64)


def sink_xor(m: int) -> BooleanFunction:
    """Sink applied to the bitwise XOR of the two edge strings."""
    n = EdgeIndexing(m).n_edges

    def evaluate(x, y):
        w = _unpack(np.bitwise_xor(x, y), n)
        r = _sink_bits(m, w)
        return r if r.ndim else int(r)

    return BooleanFunction(f"sink_xor:{m}", n, n, evaluate)


def eq(k: int) -> BooleanFunction:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")

    def evaluate(x, y):
        r = (np.asarray(x) == np.asarray(y)).astype(np.int64)
        return r if r.ndim else int(r)

    return BooleanFunction(f"eq:{k}", k, k, evaluate)


def function_from_name(name: str) -> BooleanFunction:
    """Parse ``sink_xor:m`` or ``eq:k``."""
    kind, _, arg = name.partition(":")
    if kind == "sink_xor":
        return sink_xor(int(arg))
    if kind == "eq":
        return eq(int(arg))
    raise ValueError(f"unknown function {name!r}")
