"""Quantum Shearer-type embeddings of a protocol into a sub-problem.

A protocol ``p`` on ``m`` one-bit coordinates per side is turned into a
protocol on ``t`` coordinates. For a fixed index set ``S`` the framed
protocol ``Pi_S`` places its inputs on the coordinates in ``S`` and fills the
rest with privately prepared purified samples of ``mu``. The averaged
protocol ``Pi_hat`` picks ``S`` from shared randomness ``S_A S_B``, applies
the basis permutations ``P_A^S``, ``P_B^S`` to the inputs, then runs ``Pi_S``.

Both are built as ordinary :class:`QuantumProtocol` objects with dense round
blocks, so every quantity can be measured with the same simulator. Each
party's memory is prefixed by its private registers ``[S, Xbar, R_Xbar]``
(Alice) or ``[S, Ybar, R_Ybar]`` (Bob).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .functions import BooleanFunction, EdgeIndexing, bits_to_int, eq, z_string
from .kernel import DEFAULT_TOL, PureState, RegisterLayout, mutual_information, split_register
from .quantum import (
    QuantumProtocol,
    QuantumRound,
    evolve,
    is_product,
    run_rounds,
)

__all__ = [
    "EmbeddingSpec",
    "sink_embedding_spec",
    "point_spec",
    "verify_invariance",
    "quantum_embed_fixed_set",
    "quantum_embed_averaged",
    "embedded_inputs",
    "embedded_acceptance",
    "embedded_error",
    "framed_sqic_terms",
    "channel_identity_deviation",
]


@dataclass(frozen=True)
class EmbeddingSpec:
    """Distribution over index sets with per-set input permutations.

    ``sets[j]`` lists 0-based coordinates; ``perm_a[j][v]`` is the image of
    the ``t``-bit input value ``v`` (big-endian in the order of ``sets[j]``).
    """

    m: int
    t: int
    sets: tuple[tuple[int, ...], ...]
    probs: np.ndarray
    k_bound: float
    perm_a: np.ndarray
    perm_b: np.ndarray
    tol: float = field(default=DEFAULT_TOL.exact_tol, compare=False, repr=False)

    def __post_init__(self):
        sets = tuple(tuple(int(i) for i in s) for s in self.sets)
        object.__setattr__(self, "sets", sets)
        probs = np.asarray(self.probs, dtype=float)
        if probs.shape != (len(sets),) or np.any(probs < 0) or abs(probs.sum() - 1) > self.tol:
            raise ValueError("set probabilities must be a distribution over the sets")
        for s in sets:
            if len(s) != self.t or len(set(s)) != self.t or not all(0 <= i < self.m for i in s):
                raise ValueError(f"set {s} is not a {self.t}-subset of range({self.m})")
        n = 1 << self.t
        perms = []
        for name in ("perm_a", "perm_b"):
            pa = np.asarray(getattr(self, name), dtype=np.int64)
            if pa.shape != (len(sets), n):
                raise ValueError(f"{name} must have shape {(len(sets), n)}")
            for row in pa:
                if sorted(row.tolist()) != list(range(n)):
                    raise ValueError(f"{name} row {row.tolist()} is not a permutation")
            pa.setflags(write=False)
            perms.append(pa)
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "perm_a", perms[0])
        object.__setattr__(self, "perm_b", perms[1])
        worst = self.marginals().max()
        if worst > 1 / self.k_bound + self.tol:
            raise ValueError(f"max_i Pr[i in S] = {worst} exceeds 1/k = {1 / self.k_bound}")

    def marginals(self) -> np.ndarray:
        out = np.zeros(self.m)
        for s, q in zip(self.sets, self.probs):
            out[list(s)] += q
        return out

    @property
    def s_width(self) -> int:
        return (len(self.sets) - 1).bit_length()


def sink_embedding_spec(m: int) -> EmbeddingSpec:
    """Sets E_{v_i} uniformly; Alice XORs z_{v_i}, Bob does nothing."""
    idx = EdgeIndexing(m)
    t = m - 1
    sets = [idx.incident(i) for i in range(1, m + 1)]
    vals = np.arange(1 << t)
    perm_a = [vals ^ bits_to_int(z_string(m, i)) for i in range(1, m + 1)]
    perm_b = [vals] * m
    return EmbeddingSpec(idx.n_edges, t, sets, np.full(m, 1 / m), m / 2, perm_a, perm_b)


def point_spec(m: int, subset: Sequence[int]) -> EmbeddingSpec:
    """Deterministic ``S`` with identity permutations."""
    t = len(subset)
    vals = np.arange(1 << t)
    return EmbeddingSpec(m, t, [tuple(subset)], [1.0], 1.0, [vals], [vals])


def _product_marginals(mu) -> tuple[np.ndarray, np.ndarray]:
    mu = np.asarray(getattr(mu, "probs", mu), dtype=float)
    if mu.shape != (2, 2):
        raise ValueError("coordinate distribution must be over 1 + 1 bits")
    if not is_product(mu):
        raise ValueError("embedding needs a product distribution mu_1 x mu_2")
    return mu.sum(1), mu.sum(0)


def _power(p1: np.ndarray, n: int) -> np.ndarray:
    out = np.ones(1)
    for _ in range(n):
        out = np.kron(out, p1)
    return out


def verify_invariance(spec: EmbeddingSpec, mu) -> tuple[bool, float]:
    """Check (P_A^S x P_B^S) rho_mu^{(x) t} = rho_mu^{(x) t} for every S in the support."""
    mx, my = _product_marginals(mu)
    px, py = _power(mx, spec.t), _power(my, spec.t)
    rho = np.outer(px, py)
    dev = 0.0
    for j, q in enumerate(spec.probs):
        if q == 0:
            continue
        moved = np.zeros_like(rho)
        moved[np.ix_(spec.perm_a[j], spec.perm_b[j])] = rho
        dev = max(dev, float(np.abs(moved - rho).max()))
    return dev <= spec.tol, dev


def embedded_inputs(spec: EmbeddingSpec) -> tuple[np.ndarray, np.ndarray]:
    """Full m-bit inputs as tables ``[set, input, filler]``.

    Input bit ``j`` (after the permutation) goes to coordinate ``sets[j]``;
    filler bits fill the complement in ascending order.
    """
    m, t = spec.m, spec.t
    n_in, n_fill = 1 << t, 1 << (m - t)
    tables = []
    for perms in (spec.perm_a, spec.perm_b):
        full = np.zeros((len(spec.sets), n_in, n_fill), dtype=np.int64)
        for j, s in enumerate(spec.sets):
            rest = [i for i in range(m) if i not in s]
            v = perms[j][:, None]
            f = np.arange(n_fill)[None, :]
            for b, coord in enumerate(s):
                full[j] |= ((v >> (t - 1 - b)) & 1) << (m - 1 - coord)
            for b, coord in enumerate(rest):
                full[j] |= ((f >> (m - t - 1 - b)) & 1) << (m - 1 - coord)
        tables.append(full)
    return tables[0], tables[1]


def _framed_blocks(blocks: np.ndarray, full: np.ndarray, n_s_pad: int, r_dim: int) -> np.ndarray:
    """Blocks on [S, fill, R_fill, pool] for each embedded input value."""
    n_sets, n_in, n_fill = full.shape
    d = blocks.shape[1]
    inner = n_fill * r_dim * d
    out = np.zeros((n_in, n_s_pad * inner, n_s_pad * inner), dtype=complex)
    eye_r = np.eye(r_dim)
    for v in range(n_in):
        for s in range(n_s_pad):
            for f in range(n_fill):
                lo = s * inner + f * r_dim * d
                if s < n_sets:
                    blk = np.kron(eye_r, blocks[full[s, v, f]])
                else:
                    blk = np.eye(r_dim * d)
                out[v, lo:lo + r_dim * d, lo:lo + r_dim * d] = blk
    return out


def _framed_measurement(meas: np.ndarray, full: np.ndarray, n_s_pad: int, r_dim: int) -> np.ndarray:
    n_sets, n_in, n_fill = full.shape
    d = meas.shape[1]
    inner = n_fill * r_dim * d
    out = np.zeros((n_in, n_s_pad * inner, n_s_pad * inner), dtype=complex)
    eye_r = np.eye(r_dim)
    for v in range(n_in):
        for s in range(n_sets):
            for f in range(n_fill):
                lo = s * inner + f * r_dim * d
                out[v, lo:lo + r_dim * d, lo:lo + r_dim * d] = np.kron(eye_r, meas[full[s, v, f]])
    return out


def quantum_embed_averaged(p: QuantumProtocol, spec: EmbeddingSpec, mu) -> QuantumProtocol:
    """The averaged protocol on ``t`` coordinates per side.

    ``mu`` is the per-coordinate product distribution over 1 + 1 bits. Shared
    ``|phi_S> = sum_S sqrt(Pr[S]) |S>|S>`` is prepended to ``A_0``/``B_0``
    together with each side's purified filler samples.
    """
    if (p.x_bits, p.y_bits) != (spec.m, spec.m):
        raise ValueError(f"protocol has {p.x_bits}+{p.y_bits} input bits, spec needs {spec.m}+{spec.m}")
    ok, dev = verify_invariance(spec, mu)
    if not ok:
        raise ValueError(f"mu is not invariant under the spec permutations (deviation {dev:.3g})")
    mx, my = _product_marginals(mu)
    nf = spec.m - spec.t
    ws = spec.s_width
    n_s_pad = 1 << ws
    r_dim = 1 << nf
    full_x, full_y = embedded_inputs(spec)

    phi = np.zeros((n_s_pad, n_s_pad))
    phi[np.arange(len(spec.sets)), np.arange(len(spec.sets))] = np.sqrt(spec.probs)
    fill_a = np.diag(np.sqrt(_power(mx, nf)))
    fill_b = np.diag(np.sqrt(_power(my, nf)))
    theta = p.initial_state.reshape(1 << p.a0, 1 << p.b0)
    # axes: S_A Xbar R_Xbar A_0 | S_B Ybar R_Ybar B_0
    init = np.einsum("su,fg,hk,ab->sfgauhkb", phi, fill_a, fill_b, theta).reshape(-1)

    rounds = []
    for rnd, info in zip(p.rounds, p.schedule()):
        full = full_x if info.owner == "A" else full_y
        rounds.append(QuantumRound(rnd.message, _framed_blocks(rnd.blocks, full, n_s_pad, r_dim)))
    meas = _framed_measurement(p.measurement, full_x, n_s_pad, r_dim)
    extra = ws + 2 * nf
    return QuantumProtocol(spec.t, spec.t, p.a0 + extra, p.b0 + extra, init, tuple(rounds), meas,
                           function=f"eq:{spec.t}" if (p.function or "").startswith("sink_xor") else None)


def quantum_embed_fixed_set(p: QuantumProtocol, subset: Sequence[int], mu) -> QuantumProtocol:
    """The framed protocol for a fixed index set (no shared randomness, no permutation)."""
    return quantum_embed_averaged(p, point_spec(p.x_bits, subset), mu)


# --------------------------------------------------------------------------
# channel-level quantities


def embedded_acceptance(spec: EmbeddingSpec, mu, acc: np.ndarray) -> np.ndarray:
    """Acceptance of the averaged protocol from ``p``'s acceptance table.

    Filler samples are classical once their purifications are out of reach, so
    the output probability on ``(x', y')`` is the average of ``acc`` over
    ``S`` and the filler distribution.
    """
    mx, my = _product_marginals(mu)
    nf = spec.m - spec.t
    wx, wy = _power(mx, nf), _power(my, nf)
    full_x, full_y = embedded_inputs(spec)
    n = 1 << spec.t
    out = np.zeros((n, n))
    for j, q in enumerate(spec.probs):
        if q == 0:
            continue
        # acc[full_x[j, x', f], full_y[j, y', g]] averaged over f, g
        sub = acc[full_x[j][:, :, None, None], full_y[j][None, None, :, :]]
        out += q * np.einsum("afbg,f,g->ab", sub, wx, wy)
    return out


def embedded_error(spec: EmbeddingSpec, mu, acc: np.ndarray, f: BooleanFunction | None = None) -> float:
    f = eq(spec.t) if f is None else f
    a = embedded_acceptance(spec, mu, acc)
    fx = f.truth_table()
    return float(np.where(fx == 1, 1 - a, a).max())


def framed_sqic_terms(p: QuantumProtocol, subset: Sequence[int], mu, trace=None) -> list[float]:
    """Round terms I(X_S : Y R_Y B_i C_i) / I(Y_S : X R_X A_i C_i) on ``p`` run on mu^{(x) m}."""
    m = p.x_bits
    mu = np.asarray(getattr(mu, "probs", mu), dtype=float)
    if trace is None:
        full = np.ones((1, 1))
        for _ in range(m):
            full = np.kron(full, mu)
        trace = run_rounds(p, full)
    xs = [f"X{i}" for i in range(m)]
    ys = [f"Y{i}" for i in range(m)]
    out = []
    for i in range(1, len(trace)):
        s = split_register(trace[i], "X", [(lab, 1) for lab in xs])
        s = split_register(s, "Y", [(lab, 1) for lab in ys])
        labels = set(s.layout.labels)
        if i % 2 == 1:
            a = {xs[j] for j in subset}
            b = set(ys) | ({"RY", "B", "C"} & labels)
        else:
            a = {ys[j] for j in subset}
            b = set(xs) | ({"RX", "A", "C"} & labels)
        out.append(mutual_information(s, a, b))
    return out


def _permute_qubits(amps: np.ndarray, order: Sequence[int]) -> np.ndarray:
    n = len(order)
    return np.transpose(np.asarray(amps).reshape([2] * n), order).reshape(-1)


def channel_identity_deviation(p: QuantumProtocol, subset: Sequence[int], mu,
                               sigma: PureState) -> float:
    """Max amplitude deviation between the framed protocol and ``p`` on the padded input.

    ``sigma`` is a pure state on ``E X' Y'`` (reference first) with ``X'``, ``Y'``
    of width ``|subset|``. The framed protocol runs on it directly; ``p`` runs
    on ``sigma`` with the filler purifications attached and the inputs placed on
    their coordinates. Both final states are compared qubit by qubit.
    """
    m, t = p.x_bits, len(subset)
    nf = m - t
    mx, my = _product_marginals(mu)
    e = sigma.layout.width("E") if "E" in sigma.layout else 0
    ps = quantum_embed_fixed_set(p, subset, mu)

    # framed run: E X' Y' then [Xbar RXbar A0] [Ybar RYbar B0]
    start = np.kron(sigma.amplitudes, ps.initial_state)
    regs = [("E", e), ("X", t), ("Y", t), ("A", ps.a0), ("B", ps.b0)]
    lay = RegisterLayout([r for r in regs if r[1] > 0])
    framed = evolve(ps, PureState(lay, start))[-1]

    # direct run: E X(m) RXbar Y(m) RYbar A0 B0 built from the same pieces
    fill_a = np.diag(np.sqrt(_power(mx, nf))).reshape(-1)
    fill_b = np.diag(np.sqrt(_power(my, nf))).reshape(-1)
    raw = np.kron(np.kron(np.kron(sigma.amplitudes, fill_a), fill_b), p.initial_state)
    # raw qubits: E, X'(t), Y'(t), Xbar(nf), RXbar(nf), Ybar(nf), RYbar(nf), A0, B0
    pos = 0

    def take(w):
        nonlocal pos
        out = list(range(pos, pos + w))
        pos += w
        return out

    q_e, q_x, q_y = take(e), take(t), take(t)
    q_xb, q_rx, q_yb, q_ry = take(nf), take(nf), take(nf), take(nf)
    q_a, q_b = take(p.a0), take(p.b0)
    rest = [i for i in range(m) if i not in subset]
    x_full, y_full = [None] * m, [None] * m
    for j, c in enumerate(subset):
        x_full[c], y_full[c] = q_x[j], q_y[j]
    for j, c in enumerate(rest):
        x_full[c], y_full[c] = q_xb[j], q_yb[j]
    order = q_e + x_full + q_rx + y_full + q_ry + q_a + q_b
    direct_in = _permute_qubits(raw, order)
    regs = [("E", e), ("X", m), ("RX", nf), ("Y", m), ("RY", nf), ("A", p.a0), ("B", p.b0)]
    lay = RegisterLayout([r for r in regs if r[1] > 0])
    direct = evolve(p, PureState(lay, direct_in))[-1]

    # map the framed final state onto the direct layout
    fl = framed.layout
    pos = 0
    q_e, q_x, q_y = take(e), take(t), take(t)
    a_w = fl.width("A") if "A" in fl else 0
    c_w = fl.width("C") if "C" in fl else 0
    b_w = fl.width("B") if "B" in fl else 0
    q_a = take(a_w)
    q_c = take(c_w)
    q_b = take(b_w)
    # framed memories keep their prefixes: A = [Xbar RXbar A_t], B = [Ybar RYbar B_t]
    q_xb, q_rx, q_a_rest = q_a[:nf], q_a[nf:2 * nf], q_a[2 * nf:]
    q_yb, q_ry, q_b_rest = q_b[:nf], q_b[nf:2 * nf], q_b[2 * nf:]
    x_full, y_full = [None] * m, [None] * m
    for j, c in enumerate(subset):
        x_full[c], y_full[c] = q_x[j], q_y[j]
    for j, c in enumerate(rest):
        x_full[c], y_full[c] = q_xb[j], q_yb[j]
    order = q_e + x_full + q_rx + y_full + q_ry + q_a_rest + q_c + q_b_rest
    mapped = _permute_qubits(framed.amplitudes, order)
    return float(np.abs(mapped - direct.amplitudes).max())
