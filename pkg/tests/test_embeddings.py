from __future__ import annotations

import numpy as np
import pytest

from oracles import wire_costs
from qiclab import quantum as qp
from qiclab.embeddings import (
    EmbeddingSpec,
    channel_identity_deviation,
    embedded_acceptance,
    embedded_error,
    embedded_inputs,
    framed_sqic_terms,
    point_spec,
    quantum_embed_averaged,
    quantum_embed_fixed_set,
    sink_embedding_spec,
    verify_invariance,
)
from qiclab.functions import sink_xor
from qiclab.kernel import PureState, RegisterLayout
from qiclab.rand import haar_vector, make_rng

UNIFORM = np.full((2, 2), 0.25)


def power(mu, n):
    out = np.ones((1, 1))
    for _ in range(n):
        out = np.kron(out, mu)
    return out


def test_sink_spec_marginals():
    s3 = sink_embedding_spec(3)
    assert np.allclose(s3.marginals(), 2 / 3)
    assert s3.k_bound == 1.5
    s4 = sink_embedding_spec(4)
    assert s4.k_bound == 2 and np.allclose(s4.probs, 0.25)
    assert verify_invariance(s3, UNIFORM)[0]


def test_invariance_examples():
    biased = np.outer([0.9, 0.1], [0.5, 0.5])
    ok, dev = verify_invariance(sink_embedding_spec(3), biased)
    assert not ok and dev > 0
    assert verify_invariance(point_spec(3, [0, 2]), biased)[0]
    with pytest.raises(ValueError):
        quantum_embed_averaged(qp.copy_and_answer_protocol(sink_xor(3)), sink_embedding_spec(3), biased)


def test_spec_validation():
    vals = np.arange(2)
    with pytest.raises(ValueError):
        EmbeddingSpec(3, 1, [(0,), (1,)], [0.5, 0.5], 3.0, [vals, vals], [vals, vals])  # marginal 1/2 > 1/3
    with pytest.raises(ValueError):
        EmbeddingSpec(3, 1, [(0,)], [1.0], 1.0, [[0, 0]], [vals])
    with pytest.raises(ValueError):
        EmbeddingSpec(3, 2, [(0, 0)], [1.0], 1.0, [np.arange(4)], [np.arange(4)])


def test_embedded_inputs_layout():
    fx, fy = embedded_inputs(point_spec(3, [2, 0]))
    # input bits (b0, b1) -> coordinates (2, 0); filler fills coordinate 1
    assert fx[0, 0b10, 0] == 0b001
    assert fx[0, 0b01, 1] == 0b110


def test_full_set_is_identity():
    rng = make_rng(3)
    p = qp.random_quantum_protocol(rng, 2, 2, 2, max_memory=1, max_message=1)
    ps = quantum_embed_fixed_set(p, [0, 1], np.outer([0.3, 0.7], [0.6, 0.4]))
    assert (ps.a0, ps.b0) == (p.a0, p.b0)
    for a, b in zip(ps.rounds, p.rounds):
        assert np.allclose(a.blocks, b.blocks)
    assert np.allclose(qp.acceptance_table(ps), qp.acceptance_table(p))


def test_input_independent_protocol_sqic_zero():
    p = qp.epr_message_protocol(3, 3, 2)
    ps = quantum_embed_fixed_set(p, [0, 1], UNIFORM)
    assert abs(qp.sqic(qp.run_rounds(ps, power(UNIFORM, 2)))) < 1e-9


def test_sink_embedding_m3_numbers():
    p = qp.copy_and_answer_protocol(sink_xor(3))
    spec = sink_embedding_spec(3)
    pe = quantum_embed_averaged(p, spec, UNIFORM)
    assert pe.n_rounds == p.n_rounds and pe.function == "eq:2"
    s_p = qp.sqic(qp.run_rounds(p, power(UNIFORM, 3)))
    s_e = qp.sqic(qp.run_rounds(pe, power(UNIFORM, 2)))
    assert s_e <= s_p / spec.k_bound + 1e-7
    per_set = [qp.sqic(qp.run_rounds(quantum_embed_fixed_set(p, s, UNIFORM), power(UNIFORM, 2))) for s in spec.sets]
    assert s_e == pytest.approx(np.dot(spec.probs, per_set), abs=1e-7)
    for s, v in zip(spec.sets, per_set):
        assert v == pytest.approx(sum(framed_sqic_terms(p, s, UNIFORM)), abs=1e-7)
    acc = qp.acceptance_table(p)
    assert np.allclose(embedded_acceptance(spec, UNIFORM, acc), qp.acceptance_table(pe), atol=1e-12)
    assert embedded_error(spec, UNIFORM, acc) <= 0 + (3 - 1) / 2 ** (3 - 2) + 1e-7


def test_small_averaged_embedding_against_dense_oracle():
    rng = make_rng(8)
    vals = np.arange(2)
    spec = EmbeddingSpec(2, 1, [(0,), (1,)], [0.5, 0.5], 2.0, [vals ^ 1, vals], [vals, vals])
    for _ in range(2):
        p = qp.random_quantum_protocol(rng, 2, 2, 2, max_memory=1, max_message=1)
        pe = quantum_embed_averaged(p, spec, UNIFORM)
        q, hq, sq = wire_costs(pe, power(UNIFORM, 1))
        tr = qp.run_rounds(pe, power(UNIFORM, 1))
        assert qp.sqic(tr) == pytest.approx(sq, abs=1e-8)
        assert qp.hqic(tr) == pytest.approx(hq, abs=1e-8)
        assert sq <= qp.sqic(qp.run_rounds(p, power(UNIFORM, 2))) / 2 + 1e-7


def test_channel_identity_random_inputs():
    rng = make_rng(5)
    p = qp.random_quantum_protocol(rng, 3, 3, 2, max_memory=1, max_message=1)
    for _ in range(5):
        sigma = PureState(RegisterLayout([("E", 1), ("X", 2), ("Y", 2)]), haar_vector(32, rng))
        assert channel_identity_deviation(p, [0, 2], UNIFORM, sigma) < 1e-9
