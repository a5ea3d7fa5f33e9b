from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import classical_ic_bruteforce, h
from qiclab import classical as cl
from qiclab.functions import EdgeIndexing, eq, int_to_bits, sink_xor
from qiclab.kernel import classical_bures
from qiclab.rand import make_rng


def uniform(n_x, n_y):
    return np.full((n_x, n_y), 1.0 / (n_x * n_y))


def brute_error(p, f):
    """max_(x,y) Pr[out != f] by walking every randomness triple."""
    worst = 0.0
    for x in range(p.n_x):
        for y in range(p.n_y):
            wrong = 0.0
            for (r, pr), (ra, pa), (rb, pb) in itertools.product(
                    enumerate(p.public), enumerate(p.private_a), enumerate(p.private_b)):
                prefix = 0
                for k, rnd in enumerate(p.rounds):
                    own, priv = (x, ra) if k % 2 == 0 else (y, rb)
                    prefix = (prefix << rnd.width) | int(rnd.table[own, priv, r, prefix])
                if p.output[prefix] != f.evaluate(x, y):
                    wrong += pr * pa * pb
            worst = max(worst, wrong)
    return worst


def test_constant_protocol():
    p = cl.constant_protocol(2, 2)
    assert cl.classical_ic(p, uniform(2, 2)) == 0
    assert cl.cc(p) == 1
    t = cl.enumerate_joint(p, uniform(2, 2))
    assert t.entropy(["t"]) == 0


def test_alice_sends_bit():
    p = cl.send_inputs_protocol(1, 1, bob_sends="none")
    t = cl.enumerate_joint(p, uniform(2, 2))
    assert t.entropy(["t"]) == pytest.approx(1)
    assert cl.classical_ic(p, uniform(2, 2)) == pytest.approx(1)


def test_both_send_bits():
    p = cl.send_inputs_protocol(1, 1, bob_sends="input")
    assert cl.classical_ic(p, uniform(2, 2)) == pytest.approx(2)
    assert cl.cc(cl.send_inputs_protocol(3, 3)) == 6


def test_marginal_matches_mu():
    rng = make_rng(4)
    p = cl.random_classical_protocol(rng)
    mu = rng.dirichlet(np.ones(p.n_x * p.n_y)).reshape(p.n_x, p.n_y)
    assert np.allclose(cl.enumerate_joint(p, mu).marginal_xy(), mu)


def test_ic_against_bruteforce():
    rng = make_rng(7)
    for _ in range(40):
        p = cl.random_classical_protocol(rng)
        mu = rng.dirichlet(np.ones(p.n_x * p.n_y)).reshape(p.n_x, p.n_y)
        assert cl.classical_ic(p, mu) == pytest.approx(classical_ic_bruteforce(p, mu), abs=1e-10)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_eq_protocol_ics_closed_form(k):
    n = 1 << k
    answer = cl.send_inputs_protocol(k, k, eq(k), bob_sends="answer")
    # Alice's message reveals x (k bits); Bob's bit is Eq, worth h(2^-k) to Alice
    assert cl.classical_ic(answer, uniform(n, n)) == pytest.approx(k + h(2.0 ** -k), abs=1e-12)
    both = cl.send_inputs_protocol(k, k, eq(k), bob_sends="input")
    assert cl.classical_ic(both, uniform(n, n)) == pytest.approx(2 * k, abs=1e-12)


def test_hash_protocol_errors_and_ic():
    one = cl.hash_eq_protocol(2, reps=1)
    assert cl.worst_case_error(one, eq(2)) == pytest.approx(0.5)
    two = cl.hash_eq_protocol(2, reps=2)
    assert cl.worst_case_error(two, eq(2)) == pytest.approx(0.25)
    assert cl.worst_case_error(two, eq(2), exact=True) == Fraction(1, 4)
    for p in (one, two):
        assert cl.classical_ic(p, uniform(4, 4)) == pytest.approx(classical_ic_bruteforce(p, uniform(4, 4)), abs=1e-12)


def test_errors_against_bruteforce():
    from qiclab.functions import BooleanFunction

    rng = make_rng(9)
    done = 0
    while done < 30:
        p = cl.random_classical_protocol(rng)
        if p.n_x == 3 or p.n_y == 3:
            continue
        table = rng.integers(0, 2, size=(p.n_x, p.n_y))
        f = BooleanFunction("rand", p.n_x.bit_length() - 1, p.n_y.bit_length() - 1, lambda x, y: table[x, y])
        assert cl.input_errors(p, f).max() == pytest.approx(brute_error(p, f), abs=1e-12)
        done += 1


def test_coin_flip_error_half():
    p = cl.ClassicalProtocol(2, 2, [0.5, 0.5], [1.0], [1.0],
                             [cl.ClassicalRound(1, np.array([[[[0], [1]]], [[[0], [1]]]]))], [0, 1])
    assert cl.worst_case_error(p, eq(1)) == pytest.approx(0.5)


def test_validation():
    with pytest.raises(ValueError):
        cl.ClassicalRound(1, np.full((2, 1, 1, 1), 2))
    with pytest.raises(ValueError):
        cl.ClassicalProtocol(2, 2, [1.0], [1.0], [1.0], [cl.ClassicalRound(1, np.zeros((3, 1, 1, 1)))], [0, 1])
    with pytest.raises(ValueError):
        cl.enumerate_joint(cl.constant_protocol(2, 2), uniform(3, 2))


def test_deterministic_transcript_point_mass():
    p = cl.send_inputs_protocol(2, 2, eq(2))
    d = cl.transcript_distribution(p, 1, 2)
    assert d.probs.max() == 1


def test_ic_relabel_invariance():
    rng = make_rng(12)
    p = cl.random_classical_protocol(rng, max_rounds=1, max_width=2)
    rnd = p.rounds[0]
    perm = rng.permutation(1 << rnd.width)
    q = cl.ClassicalProtocol(p.n_x, p.n_y, p.public, p.private_a, p.private_b,
                             [cl.ClassicalRound(rnd.width, perm[rnd.table])], p.output[np.argsort(perm)])
    mu = uniform(p.n_x, p.n_y)
    assert cl.classical_ic(q, mu) == pytest.approx(cl.classical_ic(p, mu), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31))
def test_cut_and_paste_and_pythagorean(seed):
    rng = make_rng(seed)
    p = cl.random_classical_protocol(rng)
    x, x2 = (int(v) for v in rng.integers(0, p.n_x, 2))
    y, y2 = (int(v) for v in rng.integers(0, p.n_y, 2))
    lhs, rhs = cl.cut_and_paste_sides(p, x, y, x2, y2)
    assert abs(lhs - rhs) <= 1e-12
    d = lambda a, b: cl.transcript_distribution(p, a, b)
    pyth = classical_bures(d(x, y2), d(x2, y2)) ** 2 + classical_bures(d(x, y), d(x2, y)) ** 2
    assert pyth <= 2 * classical_bures(d(x2, y2), d(x, y)) ** 2 + 1e-9
    assert cl.classical_ic(p, uniform(p.n_x, p.n_y)) <= cl.cc(p) + 1e-9


def _brute_embed_error(m):
    """Error of the embedded protocol computed from first principles.

    For uniform vertex i and uniform fillers, Alice's and Bob's strings are
    formed edge by edge and the full-communication protocol's answer
    Sink(x xor y) is compared to Eq(c, d).
    """
    idx = EdgeIndexing(m)
    n, k = idx.n_edges, m - 1
    edge_list = list(itertools.combinations(range(1, m + 1), 2))
    worst = Fraction(0)
    for c in range(1 << k):
        for d in range(1 << k):
            wrong = Fraction(0)
            for i in range(1, m + 1):
                inc = [q for q, e in enumerate(edge_list) if i in e]
                rest = [q for q in range(n) if q not in inc]
                z = [1 if edge_list[q][1] == i else 0 for q in inc]
                cb, db = int_to_bits(c, k), int_to_bits(d, k)
                count = 0
                for fa in range(1 << len(rest)):
                    for fb in range(1 << len(rest)):
                        xb, yb = [0] * n, [0] * n
                        for j, q in enumerate(inc):
                            xb[q], yb[q] = cb[j], db[j] ^ z[j]
                        for j, q in enumerate(rest):
                            xb[q] = int_to_bits(fa, len(rest))[j]
                            yb[q] = int_to_bits(fb, len(rest))[j]
                        w = [a ^ b for a, b in zip(xb, yb)]
                        is_sink = any(all((w[q] == 1) == (edge_list[q][1] == v) for q in range(n) if v in edge_list[q])
                                      for v in range(1, m + 1))
                        count += int(is_sink) != int(c == d)
                wrong += Fraction(count, m * (1 << (2 * len(rest))))
            worst = max(worst, wrong)
    return worst


def test_classical_embedding_m3_and_m4():
    for m in (3, 4):
        n = EdgeIndexing(m).n_edges
        p = cl.send_inputs_protocol(n, n, sink_xor(m))
        pe = cl.classical_embed(p, m)
        assert pe.function == f"eq:{m - 1}"
        assert cl.worst_case_error(pe, eq(m - 1), exact=True) == _brute_embed_error(m)
        assert cl.worst_case_error(pe, eq(m - 1), exact=True) <= Fraction(m - 1, 2 ** (m - 2))


def test_classical_embedding_ic_bound_m4():
    m, n = 4, 6
    p = cl.send_inputs_protocol(n, n, sink_xor(m))
    pe = cl.classical_embed(p, m)
    k = m - 1
    ic_e = cl.classical_ic(pe, uniform(1 << k, 1 << k))
    ic = cl.classical_ic(p, uniform(1 << n, 1 << n))
    assert ic == pytest.approx(2 * n)
    assert ic_e <= 2 / m * ic + 1e-9
    assert ic_e == pytest.approx(2 * k, abs=1e-9)
    assert math.isfinite(ic_e)
