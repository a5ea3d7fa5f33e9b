"""Registry of seeded numerical checks.

Each check draws random instances, evaluates one relation per record and
reports the largest violation. A record is ``lhs <= rhs`` (violation
``lhs - rhs``) or ``lhs == rhs`` (violation ``|lhs - rhs|``); a negative
violation is margin. A check passes when its max violation is within the
check's slack.
"""

from __future__ import annotations

import math
import time
import zlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import classical as cl
from . import quantum as qp
from .embeddings import (
    channel_identity_deviation,
    embedded_acceptance,
    embedded_error,
    framed_sqic_terms,
    point_spec,
    quantum_embed_averaged,
    quantum_embed_fixed_set,
    sink_embedding_spec,
    verify_invariance,
)
from .functions import BooleanFunction, EdgeIndexing, eq, sink_xor
from .kernel import (
    DEFAULT_TOL,
    DensityMatrix,
    PureState,
    RegisterLayout,
    Tolerances,
    bures,
    classical_bures,
    conditional_mutual_information,
    mutual_information,
    partial_trace,
    relabel,
    tensor,
    trace_distance,
)
from .rand import haar_unitary, haar_vector, make_rng, random_density_matrix, random_probs

__all__ = [
    "CheckReport",
    "ExperimentConfig",
    "Record",
    "REGISTRY",
    "UnknownCheckError",
    "run_check",
    "check_ids",
]


class UnknownCheckError(KeyError):
    pass


@dataclass(frozen=True)
class Record:
    lhs: float
    rhs: float
    kind: str = "le"
    relation: str = ""

    @property
    def violation(self) -> float:
        if self.kind == "eq":
            return abs(self.lhs - self.rhs)
        return self.lhs - self.rhs


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 0
    samples: int | None = None
    tolerances: Tolerances = DEFAULT_TOL
    m: int = 3
    rounds: int = 2


@dataclass
class CheckReport:
    check_id: str
    seed: int
    samples: int
    max_violation: float
    slack: float
    passed: bool
    runtime_ms: int
    details: list[dict] = field(default_factory=list)

    def to_dict(self, timings: bool = False) -> dict:
        d = {
            "check_id": self.check_id,
            "seed": self.seed,
            "samples": self.samples,
            "max_violation": self.max_violation,
            "slack": self.slack,
            "pass": self.passed,
            "details": self.details,
        }
        if timings:
            d["runtime_ms"] = self.runtime_ms
        return d


@dataclass(frozen=True)
class _Check:
    fn: Callable
    default_samples: int
    slack: str = "check_slack"
    statement: str = ""


REGISTRY: dict[str, _Check] = {}


def _register(check_id: str, samples: int, slack: str = "check_slack", statement: str = ""):
    def deco(fn):
        REGISTRY[check_id] = _Check(fn, samples, slack, statement)
        return fn
    return deco


def check_ids() -> list[str]:
    return sorted(REGISTRY)


def run_check(check_id: str, config: ExperimentConfig | None = None) -> CheckReport:
    config = ExperimentConfig() if config is None else config
    try:
        chk = REGISTRY[check_id]
    except KeyError:
        raise UnknownCheckError(f"unknown check {check_id!r}; known: {', '.join(check_ids())}") from None
    n = chk.default_samples if config.samples is None else config.samples
    slack = getattr(config.tolerances, chk.slack)
    stream = zlib.crc32(check_id.encode())
    t0 = time.perf_counter()
    details = []
    for s in range(n):
        rng = make_rng(config.seed, stream, s)
        for rec in chk.fn(rng, s, config):
            details.append({"sample": s, "relation": rec.relation, "kind": rec.kind,
                            "lhs": float(rec.lhs), "rhs": float(rec.rhs),
                            "violation": float(rec.violation)})
    runtime = int(round((time.perf_counter() - t0) * 1000))
    worst = max((d["violation"] for d in details), default=-math.inf)
    return CheckReport(check_id, config.seed, n, worst, slack, bool(worst <= slack), runtime, details)


# --------------------------------------------------------------------------
# random instances


def _layout(widths, names="ABCDEFG"):
    return RegisterLayout([(names[i], w) for i, w in enumerate(widths)])


def _rand_state(layout, rng) -> DensityMatrix:
    """Random state, pure about a quarter of the time, otherwise random rank."""
    if rng.random() < 0.25:
        psi = haar_vector(layout.dim, rng)
        return DensityMatrix(layout, np.outer(psi, psi.conj()), validate=False)
    return random_density_matrix(layout, rng, rank=int(rng.integers(1, layout.dim + 1)))


def _rand_widths(rng, n_regs, max_total=4):
    while True:
        w = [int(v) for v in rng.integers(1, 3, size=n_regs)]
        if sum(w) <= max_total:
            return w


def _cq_state(rng, n_x, layout) -> tuple[np.ndarray, list[DensityMatrix]]:
    p = random_probs(n_x, rng, sparsity=0.2)
    return p, [_rand_state(layout, rng) for _ in range(n_x)]


def _cq_matrix(p, states, x_bits, layout) -> DensityMatrix:
    n_x = 1 << x_bits
    d = layout.dim
    m = np.zeros((n_x * d, n_x * d), dtype=complex)
    for x, (px, st) in enumerate(zip(p, states)):
        m[x * d:(x + 1) * d, x * d:(x + 1) * d] = px * st.matrix
    full = RegisterLayout([("X", x_bits)]) + layout
    return DensityMatrix(full, m, validate=False)


# --------------------------------------------------------------------------
# distance facts


@_register("FVDG", 1000, statement="B^2 <= Delta <= sqrt(2) B")
def _fvdg(rng, s, cfg):
    lay = _layout([int(rng.integers(1, 4))])
    rho, sigma = _rand_state(lay, rng), _rand_state(lay, rng)
    b, d = bures(rho, sigma), trace_distance(rho, sigma)
    return [Record(b * b, d, relation="B^2 <= Delta"), Record(d, math.sqrt(2) * b, relation="Delta <= sqrt2 B")]


@_register("BURES_TRIANGLE", 1000, statement="B(r,s) <= B(r,t) + B(t,s)")
def _bures_triangle(rng, s, cfg):
    lay = _layout([int(rng.integers(1, 4))])
    r, t, u = (_rand_state(lay, rng) for _ in range(3))
    return [Record(bures(r, u), bures(r, t) + bures(t, u), relation="triangle")]


@_register("BURES_WEAK", 1000, statement="B^2(r1, r_{t+1}) <= t sum B^2(r_i, r_{i+1})")
def _bures_weak(rng, s, cfg):
    lay = _layout([int(rng.integers(1, 4))])
    t = int(rng.integers(1, 5))
    chain = [_rand_state(lay, rng) for _ in range(t + 1)]
    rhs = t * sum(bures(chain[i], chain[i + 1]) ** 2 for i in range(t))
    return [Record(bures(chain[0], chain[-1]) ** 2, rhs, relation=f"weak triangle t={t}")]


@_register("BURES_AVG", 1000, statement="B^2(theta_XB, theta'_XB) = E_x B^2(theta^x, theta'^x)")
def _bures_avg(rng, s, cfg):
    x_bits = int(rng.integers(1, 3))
    lay = _layout([int(rng.integers(1, 3))], names="B")
    p, a = _cq_state(rng, 1 << x_bits, lay)
    b = [_rand_state(lay, rng) for _ in a]
    lhs = bures(_cq_matrix(p, a, x_bits, lay), _cq_matrix(p, b, x_bits, lay)) ** 2
    rhs = sum(px * bures(ax, bx) ** 2 for px, ax, bx in zip(p, a, b))
    return [Record(lhs, rhs, "eq", "averaging over classical register")]


@_register("DIST_MONO", 1000, statement="Delta, B do not increase under partial trace; relabel preserves")
def _dist_mono(rng, s, cfg):
    w = _rand_widths(rng, 2)
    lay = _layout(w)
    rho, sigma = _rand_state(lay, rng), _rand_state(lay, rng)
    keep = {"A"} if rng.random() < 0.5 else {"B"}
    ra, sa = partial_trace(rho, keep), partial_trace(sigma, keep)
    ren = {"A": "A1", "B": "B1"}
    return [
        Record(trace_distance(ra, sa), trace_distance(rho, sigma), relation="Delta partial trace"),
        Record(bures(ra, sa), bures(rho, sigma), relation="B partial trace"),
        Record(trace_distance(relabel(rho, ren), relabel(sigma, ren)), trace_distance(rho, sigma), "eq", "Delta relabel"),
        Record(bures(relabel(rho, ren), relabel(sigma, ren)), bures(rho, sigma), "eq", "B relabel"),
    ]


def _local_unitary(state: DensityMatrix, label: str, u: np.ndarray) -> DensityMatrix:
    lay = state.layout
    full = np.ones((1, 1))
    for lab, w in lay.registers:
        full = np.kron(full, u if lab == label else np.eye(1 << w))
    return DensityMatrix(lay, full @ state.matrix @ full.conj().T, validate=False)


@_register("MI_MONO", 1000, statement="I(A:BC) >= I(A:B); local unitary on B preserves I(A:B)")
def _mi_mono(rng, s, cfg):
    lay = _layout(_rand_widths(rng, 3, 5))
    rho = _rand_state(lay, rng)
    u = haar_unitary(1 << lay.width("B"), rng)
    rot = _local_unitary(rho, "B", u)
    return [
        Record(mutual_information(rho, "A", "B"), mutual_information(rho, "A", {"B", "C"}), relation="trace C"),
        Record(mutual_information(rot, "A", "B"), mutual_information(rho, "A", "B"), "eq", "unitary on B"),
    ]


@_register("MI_CHAIN", 1000, statement="I(A:BC) = I(A:C) + I(A:B|C) = I(A:B) + I(A:C|B)")
def _mi_chain(rng, s, cfg):
    lay = _layout(_rand_widths(rng, 3, 5))
    rho = _rand_state(lay, rng)
    full = mutual_information(rho, "A", {"B", "C"})
    return [
        Record(full, mutual_information(rho, "A", "C") + conditional_mutual_information(rho, "A", "B", "C"), "eq", "chain via C"),
        Record(full, mutual_information(rho, "A", "B") + conditional_mutual_information(rho, "A", "C", "B"), "eq", "chain via B"),
    ]


@_register("MI_NONNEG", 1000, statement="I(A:B) >= 0, I(A:B|C) >= 0, product gives 0")
def _mi_nonneg(rng, s, cfg):
    w = _rand_widths(rng, 3, 5)
    lay = _layout(w)
    rho = _rand_state(lay, rng)
    ra = _rand_state(_layout([w[0]]), rng)
    rb = _rand_state(RegisterLayout([("B", w[1])]), rng)
    prod = tensor(ra, rb)
    return [
        Record(-mutual_information(rho, "A", "B"), 0.0, relation="I(A:B) >= 0"),
        Record(-conditional_mutual_information(rho, "A", "B", "C"), 0.0, relation="I(A:B|C) >= 0"),
        Record(mutual_information(prod, "A", "B"), 0.0, "eq", "product state"),
    ]


@_register("MI_AVG", 1000, statement="I(A:B|X) = E_x I(A:B)_{rho^x} for classical X")
def _mi_avg(rng, s, cfg):
    x_bits = int(rng.integers(1, 3))
    lay = RegisterLayout([("A", int(rng.integers(1, 3))), ("B", 1)])
    p, states = _cq_state(rng, 1 << x_bits, lay)
    rho = _cq_matrix(p, states, x_bits, lay)
    rhs = sum(px * mutual_information(st, "A", "B") for px, st in zip(p, states))
    return [Record(conditional_mutual_information(rho, "A", "B", "X"), rhs, "eq", "averaging")]


@_register("AVG_ENC", 1000, statement="sum_x p(x) B^2(rho^x, rho) <= I(X:A)")
def _avg_enc(rng, s, cfg):
    x_bits = int(rng.integers(1, 3))
    lay = RegisterLayout([("A", int(rng.integers(1, 3)))])
    p, states = _cq_state(rng, 1 << x_bits, lay)
    avg = DensityMatrix(lay, sum(px * st.matrix for px, st in zip(p, states)), validate=False)
    lhs = sum(px * bures(st, avg) ** 2 for px, st in zip(p, states) if px > 0)
    rho = _cq_matrix(p, states, x_bits, lay)
    return [Record(lhs, mutual_information(rho, "X", "A"), relation="average encoding")]


def shearer_terms(psi: DensityMatrix, u_labels: list[str], v_labels, sets, probs) -> tuple[float, float]:
    """(I(U_S : V | S), I(U : V)) for classical S drawn independently."""
    lhs = sum(q * mutual_information(psi, {u_labels[i] for i in s}, set(v_labels))
              for s, q in zip(sets, probs) if q > 0)
    return lhs, mutual_information(psi, set(u_labels), set(v_labels))


def _bell_pairs(n: int) -> DensityMatrix:
    bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
    state = PureState(RegisterLayout([("U0", 1), ("V0", 1)]), bell)
    for i in range(1, n):
        state = tensor(state, PureState(RegisterLayout([(f"U{i}", 1), (f"V{i}", 1)]), bell))
    return state.density_matrix()


def shearer_bell_witness() -> tuple[float, float]:
    """Two Bell pairs, S uniform over singletons (k = 2): returns (I(U_S:V|S), I(U:V)/2)."""
    psi = _bell_pairs(2)
    lhs, full = shearer_terms(psi, ["U0", "U1"], ["V0", "V1"], [(0,), (1,)], [0.5, 0.5])
    return lhs, full / 2


@_register("SHEARER", 1000, statement="I(U_S:V|S) <= I(U:V)/k for product U-marginals")
def _shearer(rng, s, cfg):
    if s == 0:
        lhs, rhs = shearer_bell_witness()
        return [Record(lhs, rhs, "eq", "Bell-pair witness 2 = 4/2")]
    m = int(rng.integers(2, 4))
    # tensor product of bipartite pure states U_i V_i, then a random unitary on
    # V and an optional partial trace of V; U-marginals stay product
    pieces = []
    for i in range(m):
        lay = RegisterLayout([(f"U{i}", 1), (f"V{i}", 1)])
        pieces.append(PureState(lay, haar_vector(4, rng)))
    state = pieces[0]
    for pc in pieces[1:]:
        state = tensor(state, pc)
    order = [f"U{i}" for i in range(m)] + [f"V{i}" for i in range(m)]
    from .kernel import reorder
    state = reorder(state, order)
    u = np.kron(np.eye(1 << m), haar_unitary(1 << m, rng))
    psi = PureState(state.layout, u @ state.amplitudes)
    v_labels = [f"V{i}" for i in range(m)]
    if rng.random() < 0.5:
        v_labels = v_labels[:-1]
    subsets = [tuple(i for i in range(m) if (mask >> i) & 1) for mask in range(1, 1 << m)]
    probs = random_probs(len(subsets), rng, sparsity=0.5)
    marg = np.zeros(m)
    for sub, q in zip(subsets, probs):
        marg[list(sub)] += q
    k = 1 / marg.max()
    lhs, full = shearer_terms(psi, [f"U{i}" for i in range(m)], v_labels, subsets, probs)
    return [Record(lhs, full / k, relation=f"m={m} k={k:.4g}")]


# --------------------------------------------------------------------------
# classical protocols


def _rand_inputs(rng, p):
    return (int(rng.integers(p.n_x)), int(rng.integers(p.n_y)),
            int(rng.integers(p.n_x)), int(rng.integers(p.n_y)))


@_register("CUT_PASTE_C", 1000, slack="exact_tol", statement="B(P(x,y),P(x',y')) = B(P(x,y'),P(x',y))")
def _cut_paste_c(rng, s, cfg):
    p = cl.random_classical_protocol(rng)
    a, b = cl.cut_and_paste_sides(p, *_rand_inputs(rng, p))
    return [Record(a, b, "eq", "cut-and-paste")]


@_register("PYTHAG", 1000, statement="B^2(P(x,y'),P(x',y')) + B^2(P(x,y),P(x',y)) <= 2 B^2(P(x',y'),P(x,y))")
def _pythag(rng, s, cfg):
    p = cl.random_classical_protocol(rng)
    x, y, x2, y2 = _rand_inputs(rng, p)
    d = {pair: cl.transcript_distribution(p, *pair) for pair in {(x, y), (x2, y2), (x, y2), (x2, y)}}
    lhs = classical_bures(d[x, y2], d[x2, y2]) ** 2 + classical_bures(d[x, y], d[x2, y]) ** 2
    return [Record(lhs, 2 * classical_bures(d[x2, y2], d[x, y]) ** 2, relation="Pythagorean")]


@_register("IC_LE_CC", 1000, statement="IC(P, mu) <= CC(P)")
def _ic_le_cc(rng, s, cfg):
    p = cl.random_classical_protocol(rng)
    mu = random_probs(p.n_x * p.n_y, rng, sparsity=0.3).reshape(p.n_x, p.n_y)
    return [Record(cl.classical_ic(p, mu), cl.cc(p), relation="IC <= CC")]


@_register("EMBED_IC", 2, slack="check_slack", statement="IC(P', nu) <= (2/m) IC(P, mu)")
def _embed_ic(rng, s, cfg):
    m = (4, 5)[s % 2]
    n = EdgeIndexing(m).n_edges
    p = cl.send_inputs_protocol(n, n, sink_xor(m), bob_sends="input")
    q = cl.classical_embed(p, m)
    ic_p = cl.classical_ic(p, np.full((1 << n, 1 << n), 1.0 / (1 << 2 * n)))
    ic_q = cl.classical_ic(q, np.full((1 << (m - 1), 1 << (m - 1)), 1.0 / (1 << 2 * (m - 1))))
    return [Record(ic_q, 2 / m * ic_p, relation=f"m={m}")]


def classical_embed_error(m: int) -> tuple[Fraction, float]:
    """Exact and floating worst-case error of the embedded full-communication protocol."""
    n = EdgeIndexing(m).n_edges
    p = cl.send_inputs_protocol(n, n, sink_xor(m), bob_sends="input")
    q = cl.classical_embed(p, m)
    return cl.worst_case_error(q, eq(m - 1), exact=True), cl.worst_case_error(q, eq(m - 1))


@_register("EMBED_ERR", 2, slack="exact_tol", statement="err(P') <= err(P) + (m-1)/2^(m-2), exact")
def _embed_err(rng, s, cfg):
    m = (4, 5)[s % 2]
    exact, _ = classical_embed_error(m)
    bound = Fraction(m - 1, 2 ** (m - 2))
    # rounding a rational to float is monotone, so the float comparison agrees
    # with the exact one
    return [Record(float(exact), float(bound), relation=f"m={m} exact {exact} <= {bound}")]


# --------------------------------------------------------------------------
# quantum protocols


def _product_mu(rng, x_bits, y_bits):
    mx = random_probs(1 << x_bits, rng, sparsity=0.2)
    my = random_probs(1 << y_bits, rng, sparsity=0.2)
    return np.outer(mx, my)


def _near_identity(d, eps, rng):
    h = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    h = (h + h.conj().T) / 2
    lam, q = np.linalg.eigh(h)
    return (q * np.exp(1j * eps * lam)) @ q.conj().T


def _random_function(rng, x_bits, y_bits) -> BooleanFunction:
    while True:
        table = rng.integers(0, 2, size=(1 << x_bits, 1 << y_bits))
        # non-constant along y for at least one x, so the relation has pairs
        if np.any(table.min(axis=1) != table.max(axis=1)):
            break
    table.setflags(write=False)
    return BooleanFunction("random", x_bits, y_bits, lambda x, y: table[x, y])


def _perturbed_exact(rng, f: BooleanFunction, eps: float) -> qp.QuantumProtocol:
    p = qp.copy_and_answer_protocol(f)
    rounds = []
    for rnd in p.rounds:
        d = rnd.blocks.shape[1]
        rounds.append(qp.QuantumRound(rnd.message, np.array([u @ _near_identity(d, eps, rng) for u in rnd.blocks])))
    return qp.QuantumProtocol(p.x_bits, p.y_bits, p.a0, p.b0, p.initial_state, tuple(rounds), p.measurement)


@_register("Q_CUT_PASTE", 1000, statement="B(Psi_r,A'^{u',v}, Psi_r,A'^{u',v'}) <= 2 sum_k h_k")
def _q_cut_paste(rng, s, cfg):
    p = qp.random_quantum_protocol(rng, n_rounds=int(rng.integers(1, 5)), max_memory=2, max_message=2)
    nx, ny = 1 << p.x_bits, 1 << p.y_bits
    u, u2 = (int(v) for v in rng.choice(nx, 2, replace=False))
    v, v2 = (int(w) for w in rng.choice(ny, 2, replace=False))
    r = int(rng.integers(1, p.n_rounds + 1))
    lhs, h = qp.cut_and_paste_terms(p, u, u2, v, v2, r)
    return [Record(lhs, 2 * sum(h), relation=f"r={r} of t={p.n_rounds}")]


@_register("ERR_DIST", 1000, statement="Delta(Theta^{x,y}, Theta^{x,y'}) >= 1 - 2 err when f(x,y) != f(x,y')")
def _err_dist(rng, s, cfg):
    xb, yb = int(rng.integers(1, 3)), int(rng.integers(1, 3))
    f = _random_function(rng, xb, yb)
    if rng.random() < 0.7:
        p = _perturbed_exact(rng, f, float(rng.choice([0.02, 0.1, 0.3])))
    else:
        p = qp.random_quantum_protocol(rng, x_bits=xb, y_bits=yb, measurement="projector")
    acc = qp.acceptance_table(p)
    err = qp.quantum_worst_case_error(p, f, acc)
    table = f.truth_table()
    finals = {}
    worst = None
    for x in range(1 << xb):
        for y in range(1 << yb):
            for y2 in range(y + 1, 1 << yb):
                if table[x, y] == table[x, y2]:
                    continue
                for key in ((x, y), (x, y2)):
                    if key not in finals:
                        finals[key] = qp.final_alice_state(p, *key)
                d = trace_distance(finals[x, y], finals[x, y2])
                if worst is None or d < worst[0]:
                    worst = (d, x, y, y2)
    d, x, y, y2 = worst
    return [Record(1 - 2 * err, d, relation=f"x={x} y={y} y'={y2} err={err:.6g}")]


def qic_chain_records(p: qp.QuantumProtocol, mu) -> list[Record]:
    tr = qp.run_rounds(p, mu)
    t = p.n_rounds
    q, s_, h = qp.qic(tr), qp.sqic(tr), qp.hqic(tr)
    return [
        Record(q, 2 * qp.qcc(p), relation="QIC <= 2 QCC"),
        Record(s_ / t, q, relation="SQIC/t <= QIC"),
        Record(h / t, s_ / t, relation="HQIC/t <= SQIC/t"),
        Record(q / (2 * t), h / t, relation="QIC/2t <= HQIC/t"),
    ]


@_register("QIC_CHAIN", 60, statement="2QCC >= QIC >= SQIC/t >= HQIC/t >= QIC/2t, product mu")
def _qic_chain(rng, s, cfg):
    p = qp.random_quantum_protocol(rng, n_rounds=int(rng.choice([1, 2, 3, 4])))
    return qic_chain_records(p, _product_mu(rng, p.x_bits, p.y_bits))


@_register("PRODUCT_MI", 200, statement="I(X:B_iC_i|Y) = I(X:YB_iC_i) <= I(X:YR_YB_iC_i), product mu")
def _product_mi(rng, s, cfg):
    p = qp.random_quantum_protocol(rng, n_rounds=int(rng.choice([2, 4])))
    tr = qp.run_rounds(p, _product_mu(rng, p.x_bits, p.y_bits))
    out = []
    for i in range(1, len(tr)):
        st = tr[i]
        have = set(st.layout.labels)
        if i % 2 == 1:
            own, other, r_other, side = "X", "Y", "RY", {"B", "C"} & have
        else:
            own, other, r_other, side = "Y", "X", "RX", {"A", "C"} & have
        a = conditional_mutual_information(st, {own}, side, {other})
        b = mutual_information(st, {own}, side | {other})
        c = mutual_information(st, {own}, side | {other, r_other})
        out += [Record(a, b, "eq", f"round {i} conditional = joint"), Record(b, c, relation=f"round {i} purification")]
    return out


# --------------------------------------------------------------------------
# quantum embeddings (m = 3 unless configured otherwise)


def _embed_protocol(rng, s, m):
    # sample 0 is the exact Sink o Xor protocol, the rest are random 2-round protocols
    if s == 0:
        return qp.copy_and_answer_protocol(sink_xor(m))
    n = EdgeIndexing(m).n_edges
    return qp.random_quantum_protocol(rng, x_bits=n, y_bits=n, n_rounds=2, max_memory=2, max_message=2)


_UNIFORM = np.full((2, 2), 0.25)


def _uniform(bits_x, bits_y):
    return np.full((1 << bits_x, 1 << bits_y), 1.0 / (1 << (bits_x + bits_y)))


@_register("PIS_SQIC", 3, statement="SQIC(Pi_S, mu^t) = sum of framed terms on rho_i")
def _pis_sqic(rng, s, cfg):
    m = cfg.m
    p = _embed_protocol(rng, s, m)
    n, t = p.x_bits, m - 1
    tr = qp.run_rounds(p, _uniform(n, n))
    out = []
    for st in sink_embedding_spec(m).sets:
        ps = quantum_embed_fixed_set(p, st, _UNIFORM)
        lhs = qp.sqic(qp.run_rounds(ps, _uniform(t, t)))
        out.append(Record(lhs, sum(framed_sqic_terms(p, st, _UNIFORM, tr)), "eq", f"S={list(st)}"))
    return out


@_register("PIHAT_SQIC", 3, statement="SQIC(Pi_hat) = E_S SQIC(Pi_S) <= SQIC(Pi)/k")
def _pihat_sqic(rng, s, cfg):
    m = cfg.m
    p = _embed_protocol(rng, s, m)
    n, t = p.x_bits, m - 1
    spec = sink_embedding_spec(m)
    hat = qp.sqic(qp.run_rounds(quantum_embed_averaged(p, spec, _UNIFORM), _uniform(t, t)))
    per_set = [qp.sqic(qp.run_rounds(quantum_embed_fixed_set(p, st, _UNIFORM), _uniform(t, t))) for st in spec.sets]
    full = qp.sqic(qp.run_rounds(p, _uniform(n, n)))
    return [
        Record(hat, float(np.dot(spec.probs, per_set)), "eq", "average over S"),
        Record(hat, full / spec.k_bound, relation=f"Shearer k={spec.k_bound}"),
    ]


@_register("INVARIANCE", 4, slack="exact_tol", statement="(P_A^S x P_B^S) rho_mu^t = rho_mu^t")
def _invariance(rng, s, cfg):
    if s < 3:
        m = 3 + s
        ok, dev = verify_invariance(sink_embedding_spec(m), _UNIFORM)
        return [Record(dev, 0.0, relation=f"sink spec m={m}, uniform")]
    mx, my = random_probs(2, rng), random_probs(2, rng)
    ok, dev = verify_invariance(point_spec(4, [0, 2]), np.outer(mx, my))
    return [Record(dev, 0.0, relation="identity perms, random product mu")]


@_register("EMBED_SQIC", 3, statement="SQIC(Pi_E) <= (2/m) SQIC(Pi); err(Pi_E) <= err(Pi) + (m-1)/2^(m-2)")
def _embed_sqic(rng, s, cfg):
    m = cfg.m
    p = _embed_protocol(rng, s, m)
    n, t = p.x_bits, m - 1
    f = sink_xor(m)
    spec = sink_embedding_spec(m)
    pe = quantum_embed_averaged(p, spec, _UNIFORM)
    s_e = qp.sqic(qp.run_rounds(pe, _uniform(t, t)))
    s_p = qp.sqic(qp.run_rounds(p, _uniform(n, n)))
    acc = qp.acceptance_table(p)
    err_p = qp.quantum_worst_case_error(p, f, acc)
    acc_direct = qp.acceptance_table(pe)
    err_e = qp.quantum_worst_case_error(pe, eq(t), acc_direct)
    via_channel = embedded_acceptance(spec, _UNIFORM, acc)
    bound = err_p + (m - 1) / 2 ** (m - 2)
    return [
        Record(s_e, 2 / m * s_p, relation=f"SQIC m={m}"),
        Record(err_e, bound, relation=f"err m={m}"),
        Record(float(np.abs(acc_direct - via_channel).max()), 0.0, relation="acceptance: simulation vs channel route"),
    ]


@_register("EMBED_ERR_M4", 1, statement="err(Pi_E) <= err(Pi) + 3/4 at m=4 (channel route)")
def _embed_err_m4(rng, s, cfg):
    m = 4
    p = qp.copy_and_answer_protocol(sink_xor(m))
    acc = qp.acceptance_table(p)
    err_p = qp.quantum_worst_case_error(p, sink_xor(m), acc)
    err_e = embedded_error(sink_embedding_spec(m), _UNIFORM, acc)
    return [Record(err_e, err_p + (m - 1) / 2 ** (m - 2), relation="err m=4")]


@_register("PIS_CHANNEL", 20, slack="state_tol", statement="Pi_S(sigma) = Pi(sigma (x) rho_mu^(m-t))")
def _pis_channel(rng, s, cfg):
    m = cfg.m
    p = _embed_protocol(rng, s % 2, m)
    spec = sink_embedding_spec(m)
    st = spec.sets[int(rng.integers(len(spec.sets)))]
    t = len(st)
    e = int(rng.integers(0, 3))
    regs = [("E", e), ("X", t), ("Y", t)]
    lay = RegisterLayout([r for r in regs if r[1] > 0])
    sigma = PureState(lay, haar_vector(lay.dim, rng))
    mx, my = random_probs(2, rng), random_probs(2, rng)
    dev = channel_identity_deviation(p, st, np.outer(mx, my), sigma)
    return [Record(dev, 0.0, relation=f"S={list(st)} |E|={e}")]
