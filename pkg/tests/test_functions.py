from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qiclab.functions import (
    EdgeIndexing,
    bits_to_int,
    eq,
    function_from_name,
    int_to_bits,
    project,
    sink,
    sink_xor,
    z_string,
)


def brute_sink(m, bits):
    """Orientation: bit 1 on edge {i<j} means i -> j. A sink has all edges pointing in."""
    edges = list(itertools.combinations(range(1, m + 1), 2))
    for v in range(1, m + 1):
        if all((b == 1) == (j == v) for (i, j), b in zip(edges, bits) if v in (i, j)):
            return 1
    return 0


@given(st.integers(0, 2**20), st.integers(1, 20))
def test_bits_roundtrip(v, n):
    v %= 1 << n
    assert bits_to_int(int_to_bits(v, n)) == v


def test_edge_indexing():
    idx = EdgeIndexing(4)
    assert idx.n_edges == 6
    for i in range(1, 5):
        assert len(idx.incident(i)) == 3


@pytest.mark.parametrize("m", [3, 4, 5])
def test_sink_matches_bruteforce(m):
    n = m * (m - 1) // 2
    for w in range(1 << n):
        assert sink(m, int_to_bits(w, n)) == brute_sink(m, int_to_bits(w, n))


@pytest.mark.parametrize("m", [3, 4, 5])
def test_or_of_equalities_decomposition(m):
    idx = EdgeIndexing(m)
    n = idx.n_edges
    f = sink_xor(m)
    t = m - 1
    rng = np.random.default_rng(m)
    pairs = itertools.product(range(1 << n), repeat=2) if m < 5 else zip(rng.integers(0, 1 << n, 4000), rng.integers(0, 1 << n, 4000))
    for x, y in pairs:
        xb, yb = int_to_bits(int(x), n), int_to_bits(int(y), n)
        hits = []
        for i in range(1, m + 1):
            xs = project(m, xb, i)
            ys = [a ^ b for a, b in zip(project(m, yb, i), z_string(m, i))]
            hits.append(eq(t).evaluate(bits_to_int(xs), bits_to_int(ys)))
        assert f.evaluate(int(x), int(y)) == int(any(hits))
        if m <= 4:
            assert sum(hits) <= 1


def test_eq_examples_and_names():
    f = eq(2)
    assert f.evaluate(0b01, 0b01) == 1 and f.evaluate(0b01, 0b10) == 0
    assert function_from_name("eq:2").name == "eq:2"
    assert function_from_name("sink_xor:3").x_bits == 3
    assert f.truth_table().shape == (4, 4)
    with pytest.raises(ValueError):
        function_from_name("or:2")
