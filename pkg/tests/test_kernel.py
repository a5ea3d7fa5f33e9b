from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import dense_partial_trace, entropy_bits, fidelity_dense
from qiclab.kernel import (
    ClassicalDistribution,
    DensityMatrix,
    LayoutError,
    PureState,
    RegisterLayout,
    StateError,
    basis_state,
    bures,
    classical_bures,
    classical_fidelity,
    classical_state,
    classical_trace_distance,
    conditional_mutual_information,
    entropy,
    fidelity,
    mutual_information,
    partial_trace,
    relabel,
    reorder,
    shannon_entropy,
    split_register,
    tensor,
    trace_distance,
    trace_norm,
    von_neumann_entropy,
)
from qiclab.rand import haar_unitary, make_rng, random_density_matrix, random_probs, random_pure_state


def bell(a="A", b="B"):
    return PureState(RegisterLayout([(a, 1), (b, 1)]), np.array([1, 0, 0, 1]) / math.sqrt(2))


def test_layout_basics():
    lay = RegisterLayout([("X", 2), ("A", 1)])
    assert lay.total_width == 3 and lay.dim == 8
    assert "X" in lay and "Q" not in lay
    with pytest.raises(LayoutError):
        lay.width("Q")
    with pytest.raises(LayoutError):
        RegisterLayout([("X", 1), ("X", 1)])


def test_state_validation():
    with pytest.raises(StateError):
        PureState(RegisterLayout([("A", 1)]), [1, 1])
    with pytest.raises(StateError):
        DensityMatrix(RegisterLayout([("A", 1)]), np.diag([1.5, -0.5]))
    with pytest.raises(StateError):
        DensityMatrix(RegisterLayout([("A", 1)]), np.array([[0.5, 0.5], [0, 0.5]]))


def test_basis_state_big_endian():
    s = basis_state(RegisterLayout([("A", 1), ("B", 2)]), {"A": 1, "B": 2})
    assert s.amplitudes[0b110] == 1


def test_entropy_closed_forms():
    rho = classical_state(RegisterLayout([("A", 1)]), [0.75, 0.25])
    assert von_neumann_entropy(rho) == pytest.approx(2 - 0.75 * math.log2(3), abs=1e-9)
    assert mutual_information(bell(), "A", "B") == pytest.approx(2, abs=1e-9)
    ghz = PureState(RegisterLayout([("A", 1), ("B", 1), ("C", 1)]), np.array([1, 0, 0, 0, 0, 0, 0, 1]) / math.sqrt(2))
    assert conditional_mutual_information(ghz, "A", "B", "C") == pytest.approx(1, abs=1e-9)
    assert mutual_information(ghz, "A", {"B", "C"}) == pytest.approx(2, abs=1e-9)
    # classical GHZ: I(A:B|C) = 0 and I(A:B) = 1
    cghz = ghz.density_matrix()
    m = np.diag(np.diag(cghz.matrix))
    cg = DensityMatrix(cghz.layout, m)
    assert mutual_information(cg, "A", "B") == pytest.approx(1, abs=1e-9)


def test_ghz4_cmi():
    psi = np.zeros(16)
    psi[0] = psi[15] = 1 / math.sqrt(2)
    s = PureState(RegisterLayout([("A", 1), ("B", 1), ("C", 1), ("D", 1)]), psi)
    assert conditional_mutual_information(s, "A", "B", "C") == pytest.approx(0, abs=1e-9)
    assert conditional_mutual_information(s, "A", {"B", "D"}, "C") == pytest.approx(1, abs=1e-9)


def test_empty_registers_give_zero():
    assert mutual_information(bell(), set(), "B") == 0
    assert entropy(bell(), []) == 0


def test_partial_trace_matches_dense_oracle():
    rng = make_rng(11)
    for _ in range(50):
        widths = list(rng.integers(1, 3, size=rng.integers(2, 4)))
        lay = RegisterLayout([(f"R{i}", int(w)) for i, w in enumerate(widths)])
        s = random_pure_state(lay, rng)
        keep = sorted(rng.choice(len(widths), size=rng.integers(1, len(widths)), replace=False).tolist())
        got = partial_trace(s, [f"R{i}" for i in keep]).matrix
        want = dense_partial_trace(s.amplitudes, widths, keep)
        assert np.max(np.abs(got - want)) < 1e-12
        got_mixed = partial_trace(s.density_matrix(), [f"R{i}" for i in keep]).matrix
        assert np.max(np.abs(got_mixed - want)) < 1e-12


def test_partial_trace_order_and_reorder():
    rng = make_rng(3)
    lay = RegisterLayout([("A", 1), ("B", 2), ("C", 1)])
    s = random_pure_state(lay, rng)
    seq = partial_trace(s, ["C", "A"])
    st_ = partial_trace(reorder(s, ["C", "B", "A"]), {"C", "A"})
    assert seq.layout.labels == ("C", "A")
    assert np.allclose(seq.matrix, st_.matrix)
    assert partial_trace(s, {"C", "A"}).layout.labels == ("A", "C")


def test_relabel_split_tensor():
    s = bell()
    r = relabel(s, {"A": "X"})
    assert r.layout.labels == ("X", "B")
    t = tensor(s, bell("C", "D"))
    assert t.layout.labels == ("A", "B", "C", "D")
    sp = split_register(PureState(RegisterLayout([("A", 2)]), [0, 1, 0, 0]), "A", [("A1", 1), ("A2", 1)])
    assert partial_trace(sp, "A2").matrix[1, 1] == pytest.approx(1)


def test_fidelity_against_dense_oracle_and_overlap():
    rng = make_rng(5)
    lay = RegisterLayout([("A", 2)])
    for _ in range(100):
        a = random_density_matrix(lay, rng, rank=int(rng.integers(1, 5)))
        b = random_density_matrix(lay, rng, rank=int(rng.integers(1, 5)))
        assert fidelity(a, b) == pytest.approx(fidelity_dense(a.matrix, b.matrix), abs=1e-7)
        p, q = random_pure_state(lay, rng), random_pure_state(lay, rng)
        assert fidelity(p, q) == pytest.approx(abs(np.vdot(p.amplitudes, q.amplitudes)), abs=1e-9)


def test_distances_basic():
    a = classical_state(RegisterLayout([("A", 1)]), [1, 0])
    b = classical_state(RegisterLayout([("A", 1)]), [0, 1])
    assert fidelity(a, a) == pytest.approx(1)
    assert trace_distance(a, b) == pytest.approx(1)
    assert bures(a, b) == pytest.approx(1)
    assert trace_norm(np.diag([1, -2])) == pytest.approx(3)
    with pytest.raises(LayoutError):
        fidelity(a, classical_state(RegisterLayout([("B", 1)]), [1, 0]))


def test_classical_distances():
    p, q = np.array([0.5, 0.5]), np.array([1.0, 0.0])
    assert classical_fidelity(p, q) == pytest.approx(math.sqrt(0.5))
    assert classical_bures(p, q) ** 2 == pytest.approx(1 - math.sqrt(0.5))
    assert classical_trace_distance(p, q) == pytest.approx(0.5)
    assert shannon_entropy([0.25] * 4) == pytest.approx(2)
    d = ClassicalDistribution(np.full((2, 3), 1 / 6))
    assert d.marginal([1]).shape == (3,)


def test_classical_matches_quantum_on_diagonals():
    rng = make_rng(8)
    lay = RegisterLayout([("A", 2)])
    for _ in range(20):
        p, q = random_probs(4, rng), random_probs(4, rng, sparsity=0.3)
        a, b = classical_state(lay, p), classical_state(lay, q)
        assert classical_bures(p, q) == pytest.approx(bures(a, b), abs=1e-7)
        assert classical_trace_distance(p, q) == pytest.approx(trace_distance(a, b), abs=1e-12)
        assert shannon_entropy(p) == pytest.approx(von_neumann_entropy(a), abs=1e-9)


def test_entropy_complement_for_pure_states():
    rng = make_rng(2)
    lay = RegisterLayout([("A", 1), ("B", 3)])
    s = random_pure_state(lay, rng)
    assert entropy(s, {"A"}) == pytest.approx(entropy(s, {"B"}), abs=1e-9)
    assert entropy(s, {"B"}) == pytest.approx(entropy_bits(partial_trace(s, "B").matrix), abs=1e-9)


def test_rng_reproducible_and_haar_unitary():
    u1 = haar_unitary(4, make_rng(1, 2, 3))
    u2 = haar_unitary(4, make_rng(1, 2, 3))
    assert np.array_equal(u1, u2)
    assert np.allclose(u1 @ u1.conj().T, np.eye(4))
    assert not np.array_equal(u1, haar_unitary(4, make_rng(1, 2, 4)))


seeds = st.integers(0, 2**31)


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(1, 3))
def test_fvdg_property(seed, w):
    rng = make_rng(seed)
    lay = RegisterLayout([("A", w)])
    a, b = random_density_matrix(lay, rng), random_density_matrix(lay, rng, rank=1)
    bb, d = bures(a, b), trace_distance(a, b)
    assert bb ** 2 <= d + 1e-9
    assert d <= math.sqrt(2) * bb + 1e-9


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_strong_subadditivity_property(seed):
    rng = make_rng(seed)
    lay = RegisterLayout([("A", 1), ("B", 1), ("C", 1), ("D", 1)])
    s = random_pure_state(lay, rng)
    assert conditional_mutual_information(s, "A", "B", "C") >= -1e-9
    assert mutual_information(s, "A", {"B", "C"}) >= mutual_information(s, "A", "B") - 1e-9


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_local_unitary_invariance_property(seed):
    rng = make_rng(seed)
    lay = RegisterLayout([("A", 1), ("B", 2)])
    rho = random_density_matrix(lay, rng)
    u = np.kron(haar_unitary(2, rng), haar_unitary(4, rng))
    rot = DensityMatrix(lay, u @ rho.matrix @ u.conj().T)
    assert mutual_information(rot, "A", "B") == pytest.approx(mutual_information(rho, "A", "B"), abs=1e-8)
