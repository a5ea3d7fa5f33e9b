"""Entanglement-assisted quantum protocols with purified classical inputs.

Model. Alice holds memory ``A`` and Bob memory ``B``; they start in a shared
pure state on ``A_0 B_0``. Rounds alternate Alice (odd rounds), Bob (even
rounds). In a round the owner's *pool* is its memory followed by the message
just received (empty in round 1). The owner applies a unitary to the pool,
block-diagonal in its classical input, and the last ``message`` qubits of the
pool become the outgoing message ``C_r``; the rest is the new memory. At the
end Alice measures ``{M, I - M}`` on her final registers (memory, plus the
last message when it was sent to her); outcome ``M`` means output 1.

Simulated states use registers ``X R_X Y R_Y`` (inputs and purifications)
followed by ``A C B``. Registers of width 0 are omitted from layouts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .functions import BooleanFunction
from .kernel import (
    DEFAULT_TOL,
    ClassicalDistribution,
    PureState,
    RegisterLayout,
    conditional_mutual_information,
    mutual_information,
    partial_trace,
)

__all__ = [
    "QuantumRound",
    "QuantumProtocol",
    "RoundTrace",
    "RoundInfo",
    "round_schedule",
    "alice_final_width",
    "input_states",
    "input_errors",
    "purified_inputs",
    "alice_final_labels",
    "SimulationCapError",
    "PURE_STATE_CAP",
    "prepare_initial",
    "evolve",
    "run_rounds",
    "run_on_input",
    "acceptance_table",
    "quantum_worst_case_error",
    "qic",
    "hqic",
    "sqic",
    "qcc",
    "qic_terms",
    "hqic_terms",
    "sqic_terms",
    "is_product",
    "blocks_from_operator",
    "compile_gates",
    "copy_and_answer_protocol",
    "epr_message_protocol",
    "random_quantum_protocol",
    "send_input_protocol",
    "side_labels",
    "receiver_marginal",
    "cut_and_paste_terms",
    "final_alice_state",
]

PURE_STATE_CAP = 24


class SimulationCapError(RuntimeError):
    pass


def _check_unitary(u: np.ndarray, tol: float, what: str):
    eye = np.eye(u.shape[-1])
    dev = np.max(np.abs(np.conj(np.swapaxes(u, -1, -2)) @ u - eye), initial=0.0)
    if dev > tol:
        raise ValueError(f"{what} is not unitary (deviation {dev:.3g})")


@dataclass(frozen=True)
class QuantumRound:
    """One round: ``blocks[v]`` is the unitary on the pool for input value ``v``."""

    message: int
    blocks: np.ndarray

    def __post_init__(self):
        b = np.array(self.blocks, dtype=complex)
        if b.ndim != 3 or b.shape[1] != b.shape[2]:
            raise ValueError(f"blocks must have shape (n_inputs, D, D), got {b.shape}")
        b.setflags(write=False)
        object.__setattr__(self, "blocks", b)

    @property
    def pool_width(self) -> int:
        return int(self.blocks.shape[1]).bit_length() - 1


@dataclass(frozen=True)
class RoundInfo:
    owner: str
    pool: int
    memory_out: int
    message: int


def round_schedule(a0: int, b0: int, messages: Sequence[int]) -> list[RoundInfo]:
    """Pool and memory widths per round for the given message widths."""
    a, b, c = a0, b0, 0
    out = []
    for r, msg in enumerate(messages, start=1):
        alice = r % 2 == 1
        pool = (a if alice else b) + c
        if msg > pool:
            raise ValueError(f"round {r} sends {msg} qubits from a pool of {pool}")
        mem = pool - msg
        if alice:
            a = mem
        else:
            b = mem
        c = msg
        out.append(RoundInfo("A" if alice else "B", pool, mem, c))
    return out


def alice_final_width(a0: int, b0: int, messages: Sequence[int]) -> int:
    sched = round_schedule(a0, b0, messages)
    a = next((i.memory_out for i in reversed(sched) if i.owner == "A"), a0)
    return a + (sched[-1].message if sched and sched[-1].owner == "B" else 0)


@dataclass(frozen=True)
class QuantumProtocol:
    x_bits: int
    y_bits: int
    a0: int
    b0: int
    initial_state: np.ndarray
    rounds: tuple[QuantumRound, ...]
    measurement: np.ndarray
    function: str | None = None
    tol: float = field(default=DEFAULT_TOL.state_tol, compare=False, repr=False)

    def __post_init__(self):
        theta = np.array(self.initial_state, dtype=complex).reshape(-1)
        if theta.size != 1 << (self.a0 + self.b0):
            raise ValueError(f"initial state needs dimension {1 << (self.a0 + self.b0)}")
        if abs(np.linalg.norm(theta) - 1) > self.tol:
            raise ValueError("initial state is not normalized")
        theta.setflags(write=False)
        object.__setattr__(self, "initial_state", theta)
        rounds = tuple(self.rounds)
        object.__setattr__(self, "rounds", rounds)
        for r, (rnd, info) in enumerate(zip(rounds, self.schedule()), start=1):
            n_in = 1 << (self.x_bits if info.owner == "A" else self.y_bits)
            if rnd.blocks.shape != (n_in, 1 << info.pool, 1 << info.pool):
                raise ValueError(
                    f"round {r} blocks have shape {rnd.blocks.shape}, "
                    f"expected {(n_in, 1 << info.pool, 1 << info.pool)}")
            _check_unitary(rnd.blocks, self.tol, f"round {r} operator")
        m = np.array(self.measurement, dtype=complex)
        if m.ndim == 2:
            m = np.broadcast_to(m, (1 << self.x_bits,) + m.shape).copy()
        d = 1 << self.alice_final_width
        if m.shape != (1 << self.x_bits, d, d):
            raise ValueError(f"measurement has shape {m.shape}, expected {(1 << self.x_bits, d, d)}")
        if np.max(np.abs(m - np.conj(np.swapaxes(m, 1, 2))), initial=0.0) > self.tol:
            raise ValueError("measurement operator is not Hermitian")
        lam = np.linalg.eigvalsh(m)
        if lam.min() < -self.tol or lam.max() > 1 + self.tol:
            raise ValueError("measurement operator must satisfy 0 <= M <= I")
        m.setflags(write=False)
        object.__setattr__(self, "measurement", m)

    @property
    def n_rounds(self) -> int:
        return len(self.rounds)

    def schedule(self) -> list[RoundInfo]:
        return round_schedule(self.a0, self.b0, [r.message for r in self.rounds])

    @property
    def alice_final_width(self) -> int:
        return alice_final_width(self.a0, self.b0, [r.message for r in self.rounds])

    @property
    def total_width(self) -> int:
        return self.a0 + self.b0


def qcc(p: QuantumProtocol) -> int:
    return sum(r.message for r in p.rounds)


# --------------------------------------------------------------------------
# simulation


@dataclass(frozen=True)
class RoundTrace:
    """Global states Psi_0 .. Psi_t with registers X R_X Y R_Y A C B."""

    protocol: QuantumProtocol
    mu: np.ndarray
    states: tuple[PureState, ...]

    def __len__(self):
        return len(self.states)

    def __getitem__(self, r) -> PureState:
        return self.states[r]


def evolve(p: QuantumProtocol, state: PureState, x: str = "X", y: str = "Y",
           a: str = "A", b: str = "B", inputs: tuple[int, int] | None = None,
           cap: int = PURE_STATE_CAP) -> list[PureState]:
    """Run every round on ``state``; return the states after rounds 0..t.

    ``state`` must contain registers ``a`` and ``b`` (the protocol's A_0, B_0)
    and, unless ``inputs`` fixes them classically, the input registers ``x``
    and ``y``. Other registers are carried along untouched. Output layouts are
    the non-protocol registers in their original order followed by
    ``A``, ``C``, ``B``.
    """
    layout = state.layout
    n = layout.total_width
    if n > cap:
        raise SimulationCapError(f"{n} qubits exceeds the pure-state cap of {cap}")
    def width(lab):
        return layout.width(lab) if lab in layout else 0

    if width(a) != p.a0 or width(b) != p.b0:
        raise ValueError("state registers do not match the protocol's A_0/B_0 widths")
    axes, pos = {}, 0
    for lab, w in layout.registers:
        axes[lab] = list(range(pos, pos + w))
        pos += w
    if inputs is None:
        if width(x) != p.x_bits or width(y) != p.y_bits:
            raise ValueError("input register widths do not match the protocol")
    passive = [lab for lab in layout.labels if lab not in (a, b)]
    mem_a, mem_b, msg = axes.get(a, []), axes.get(b, []), []
    psi = state.amplitudes.reshape([2] * n) if n else state.amplitudes

    def snapshot():
        regs, order = [], []
        for lab in passive:
            regs.append((lab, layout.width(lab)))
            order += axes[lab]
        for lab, ax in (("A", mem_a), ("C", msg), ("B", mem_b)):
            if ax:
                regs.append((lab, len(ax)))
                order += ax
        return PureState(RegisterLayout(regs), np.transpose(psi, order).reshape(-1), tol=1e-6)

    out = [snapshot()]
    for r, (rnd, info) in enumerate(zip(p.rounds, p.schedule()), start=1):
        alice = info.owner == "A"
        pool = (mem_a if alice else mem_b) + msg
        if inputs is not None:
            blk = rnd.blocks[inputs[0] if alice else inputs[1]][None]
            ctrl = []
        else:
            blk = rnd.blocks
            ctrl = axes.get(x if alice else y, [])
        if pool:
            rest = [q for q in range(n) if q not in ctrl and q not in pool]
            perm = ctrl + pool + rest
            t = np.transpose(psi, perm).reshape(1 << len(ctrl), 1 << len(pool), -1)
            t = np.matmul(blk, t)
            psi = np.transpose(t.reshape([2] * n), np.argsort(perm))
        elif ctrl:
            # a 1x1 block per input value is a phase
            perm = ctrl + [q for q in range(n) if q not in ctrl]
            t = np.transpose(psi, perm).reshape(1 << len(ctrl), -1) * blk[:, 0, :1]
            psi = np.transpose(t.reshape([2] * n), np.argsort(perm))
        else:
            psi = psi * blk[0, 0, 0]
        new_mem, msg = pool[:info.memory_out], pool[info.memory_out:]
        if alice:
            mem_a = new_mem
        else:
            mem_b = new_mem
        out.append(snapshot())
    return out


def _mu_array(p: QuantumProtocol, mu) -> np.ndarray:
    mu = mu.probs if isinstance(mu, ClassicalDistribution) else np.asarray(mu, dtype=float)
    if mu.shape != (1 << p.x_bits, 1 << p.y_bits):
        raise ValueError(f"input distribution has shape {mu.shape}, "
                         f"expected {(1 << p.x_bits, 1 << p.y_bits)}")
    if np.any(mu < 0) or abs(mu.sum() - 1) > 1e-12:
        raise ValueError("input distribution is not normalized")
    return mu


def purified_inputs(mu: np.ndarray, x_bits: int, y_bits: int) -> np.ndarray:
    """Amplitudes of sum_xy sqrt(mu(x,y)) |x x y y> on X R_X Y R_Y."""
    nx, ny = 1 << x_bits, 1 << y_bits
    t = np.zeros((nx, nx, ny, ny), dtype=complex)
    xs, ys = np.arange(nx), np.arange(ny)
    t[xs[:, None], xs[:, None], ys[None, :], ys[None, :]] = np.sqrt(mu)
    return t.reshape(-1)


def prepare_initial(p: QuantumProtocol, mu) -> PureState:
    mu = _mu_array(p, mu)
    regs = [("X", p.x_bits), ("RX", p.x_bits), ("Y", p.y_bits), ("RY", p.y_bits),
            ("A", p.a0), ("B", p.b0)]
    amps = np.kron(purified_inputs(mu, p.x_bits, p.y_bits), p.initial_state)
    return PureState(RegisterLayout([r for r in regs if r[1] > 0]), amps)


def run_rounds(p: QuantumProtocol, mu, cap: int = PURE_STATE_CAP) -> RoundTrace:
    mu = _mu_array(p, mu)
    n = 2 * (p.x_bits + p.y_bits) + p.total_width
    if n > cap:
        raise SimulationCapError(f"{n} qubits exceeds the pure-state cap of {cap}")
    states = evolve(p, prepare_initial(p, mu), cap=cap)
    return RoundTrace(p, mu, tuple(states))


def _point_state(p: QuantumProtocol) -> PureState:
    regs = [(lab, w) for lab, w in (("A", p.a0), ("B", p.b0)) if w > 0]
    return PureState(RegisterLayout(regs), p.initial_state)


def input_states(p: QuantumProtocol, x: int, y: int) -> list[PureState]:
    """States Theta_r^{x,y} on A C B for rounds 0..t with fixed inputs."""
    if not (0 <= x < 1 << p.x_bits and 0 <= y < 1 << p.y_bits):
        raise ValueError(f"input ({x}, {y}) out of range")
    return evolve(p, _point_state(p), inputs=(x, y))


def alice_final_labels(p: QuantumProtocol) -> list[str]:
    sched = p.schedule()
    labels = ["A"]
    if sched and sched[-1].owner == "B" and sched[-1].message > 0:
        labels.append("C")
    return labels


def run_on_input(p: QuantumProtocol, x: int, y: int) -> tuple[PureState, float]:
    """Final state Theta_t^{x,y} on A C B and the probability of output 1."""
    final = input_states(p, x, y)[-1]
    keep = [lab for lab in alice_final_labels(p) if lab in final.layout]
    if not keep:
        m = p.measurement[x]
        return final, float(np.real(m[0, 0]))
    rho = partial_trace(final, keep).matrix
    acc = float(np.real(np.trace(rho @ p.measurement[x])))
    return final, min(max(acc, 0.0), 1.0)


def acceptance_table(p: QuantumProtocol) -> np.ndarray:
    """Pr[output 1] for every input pair, shape (2**x_bits, 2**y_bits)."""
    nx, ny = 1 << p.x_bits, 1 << p.y_bits
    return np.array([[run_on_input(p, x, y)[1] for y in range(ny)] for x in range(nx)])


def input_errors(p: QuantumProtocol, f: BooleanFunction, acc: np.ndarray | None = None) -> np.ndarray:
    if (f.x_bits, f.y_bits) != (p.x_bits, p.y_bits):
        raise ValueError(f"{f.name} does not match protocol input widths")
    acc = acceptance_table(p) if acc is None else acc
    fx = np.asarray(f.truth_table())
    return np.where(fx == 1, 1.0 - acc, acc)


def quantum_worst_case_error(p: QuantumProtocol, f: BooleanFunction, acc: np.ndarray | None = None) -> float:
    return float(input_errors(p, f, acc).max())


# --------------------------------------------------------------------------
# information costs


def _present(state, labels):
    return {lab for lab in labels if lab in state.layout}


def qic_terms(trace: RoundTrace) -> list[float]:
    """Per-round terms: I(R_X R_Y : C_i | Y B_i) odd, I(R_X R_Y : C_i | X A_i) even."""
    out = []
    for i in range(1, len(trace)):
        s = trace[i]
        cond = ("Y", "B") if i % 2 == 1 else ("X", "A")
        out.append(conditional_mutual_information(
            s, _present(s, ("RX", "RY")), _present(s, ("C",)), _present(s, cond)))
    return out


def hqic_terms(trace: RoundTrace) -> list[float]:
    """I(X : B_i C_i | Y) odd, I(Y : A_i C_i | X) even."""
    out = []
    for i in range(1, len(trace)):
        s = trace[i]
        if i % 2 == 1:
            out.append(conditional_mutual_information(s, _present(s, "X"), _present(s, ("B", "C")), _present(s, "Y")))
        else:
            out.append(conditional_mutual_information(s, _present(s, "Y"), _present(s, ("A", "C")), _present(s, "X")))
    return out


def is_product(mu, tol: float = DEFAULT_TOL.exact_tol) -> bool:
    mu = mu.probs if isinstance(mu, ClassicalDistribution) else np.asarray(mu, dtype=float)
    return bool(np.max(np.abs(mu - np.outer(mu.sum(1), mu.sum(0)))) <= tol)


def sqic_terms(trace: RoundTrace, mu=None) -> list[float]:
    """I(X : Y R_Y B_i C_i) odd, I(Y : X R_X A_i C_i) even; product inputs only."""
    mu = trace.mu if mu is None else mu
    if not is_product(mu):
        raise ValueError("superposed-Holevo cost needs a product input distribution")
    out = []
    for i in range(1, len(trace)):
        s = trace[i]
        if i % 2 == 1:
            out.append(mutual_information(s, _present(s, "X"), _present(s, ("Y", "RY", "B", "C"))))
        else:
            out.append(mutual_information(s, _present(s, "Y"), _present(s, ("X", "RX", "A", "C"))))
    return out


def qic(trace: RoundTrace) -> float:
    return float(sum(qic_terms(trace)))


def hqic(trace: RoundTrace) -> float:
    return float(sum(hqic_terms(trace)))


def sqic(trace: RoundTrace, mu=None) -> float:
    return float(sum(sqic_terms(trace, mu)))


# --------------------------------------------------------------------------
# operator construction


def blocks_from_operator(op, input_bits: int, pool_width: int, tol: float = DEFAULT_TOL.state_tol) -> np.ndarray:
    """Split a dense operator on (input, pool) into per-input blocks.

    The input register is most significant. Raises if the operator does not
    commute with the projectors onto the input basis values.
    """
    op = np.asarray(op, dtype=complex)
    ni, d = 1 << input_bits, 1 << pool_width
    if op.shape != (ni * d, ni * d):
        raise ValueError(f"operator shape {op.shape} does not match {(ni * d, ni * d)}")
    t = op.reshape(ni, d, ni, d)
    off = t.copy()
    idx = np.arange(ni)
    off[idx, :, idx, :] = 0
    if np.max(np.abs(off), initial=0.0) > tol:
        raise ValueError("operator is not block-diagonal in the input basis")
    return np.array([t[v, :, v, :] for v in range(ni)])


_GATES = {
    "h": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _gate_matrix(name: str, qubits: Sequence[int], width: int) -> np.ndarray:
    d = 1 << width
    if name in _GATES:
        (q,) = qubits
        return np.kron(np.kron(np.eye(1 << q), _GATES[name]), np.eye(1 << (width - q - 1)))
    if name in ("cnot", "swap"):
        c, t = qubits
        idx = np.arange(d)
        bc, bt = (idx >> (width - 1 - c)) & 1, (idx >> (width - 1 - t)) & 1
        if name == "cnot":
            new = idx ^ (bc << (width - 1 - t))
        else:
            new = idx ^ ((bc ^ bt) << (width - 1 - c)) ^ ((bc ^ bt) << (width - 1 - t))
        u = np.zeros((d, d), dtype=complex)
        u[new, idx] = 1
        return u
    raise ValueError(f"unknown gate {name!r}")


def compile_gates(gates: Sequence[dict], input_bits: int, pool_width: int) -> np.ndarray:
    """Per-input blocks from a gate list.

    Each gate is ``{"gate": h|x|z|cnot|swap, "qubits": [...]}`` with pool
    qubit indices (0 = most significant) and an optional classical control
    ``"if_input": {"bit": j, "value": v}`` on bit ``j`` of the owner's input
    (0 = most significant).
    """
    ni = 1 << input_bits
    blocks = np.array([np.eye(1 << pool_width, dtype=complex) for _ in range(ni)])
    for g in gates:
        for q in g["qubits"]:
            if not 0 <= q < pool_width:
                raise ValueError(f"gate qubit {q} outside pool of width {pool_width}")
        u = _gate_matrix(g["gate"], g["qubits"], pool_width)
        cond = g.get("if_input")
        for v in range(ni):
            if cond is not None and ((v >> (input_bits - 1 - cond["bit"])) & 1) != cond["value"]:
                continue
            blocks[v] = u @ blocks[v]
    return blocks


def _perm_matrix(mapping: np.ndarray) -> np.ndarray:
    d = len(mapping)
    u = np.zeros((d, d), dtype=complex)
    u[mapping, np.arange(d)] = 1
    return u


# --------------------------------------------------------------------------
# protocol builders


def copy_and_answer_protocol(f: BooleanFunction) -> QuantumProtocol:
    """Alice sends a copy of x; Bob answers f(x, y) on one qubit; Alice reads it.

    Two rounds, exact, ``QCC = x_bits + 1``.
    """
    xb, yb = f.x_bits, f.y_bits
    nx, ny = 1 << xb, 1 << yb
    r1 = np.array([_perm_matrix(np.arange(nx) ^ x) for x in range(nx)])
    # Bob's pool is (b, c) with b his ancilla; map |b, c> -> |c, b xor f(c, y)>
    idx = np.arange(2 * nx)
    b, c = idx >> xb, idx & (nx - 1)
    r2 = []
    for y in range(ny):
        fv = np.asarray(f.evaluate(c, np.full_like(c, y)))
        r2.append(_perm_matrix((c << 1) | (b ^ fv)))
    theta = np.zeros(1 << (xb + 1))
    theta[0] = 1
    meas = np.diag([0.0, 1.0])
    return QuantumProtocol(xb, yb, xb, 1, theta,
                           (QuantumRound(xb, r1), QuantumRound(1, np.array(r2))),
                           meas, function=f.name)


def epr_message_protocol(x_bits: int, y_bits: int, n_rounds: int = 2) -> QuantumProtocol:
    """Input-independent protocol whose messages are halves of shared EPR pairs.

    ``A_0`` and ``B_0`` hold ``n_rounds`` maximally entangled pairs; each round
    the owner sends one qubit of its pool unchanged. Alice outputs a fair coin.
    """
    pairs = n_rounds
    theta = np.eye(1 << pairs, dtype=complex).reshape(-1) / np.sqrt(1 << pairs)
    rounds = []
    for info in round_schedule(pairs, pairs, [1] * n_rounds):
        ni = 1 << (x_bits if info.owner == "A" else y_bits)
        rounds.append(QuantumRound(1, np.array([np.eye(1 << info.pool)] * ni)))
    d = 1 << alice_final_width(pairs, pairs, [1] * n_rounds)
    return QuantumProtocol(x_bits, y_bits, pairs, pairs, theta, tuple(rounds), np.eye(d) * 0.5)


def random_quantum_protocol(rng, x_bits: int | None = None, y_bits: int | None = None,
                            n_rounds: int | None = None, max_memory: int = 2,
                            max_message: int = 2, max_qubits: int = 10,
                            measurement: str = "random") -> QuantumProtocol:
    """Haar-random round unitaries, initial state and measurement.

    ``max_qubits`` bounds the protocol registers (A_0 B_0). With
    ``measurement='projector'`` the effect is a random rank-half projector.
    """
    from .rand import haar_unitary, haar_vector, random_effect

    xb = int(rng.integers(1, 3)) if x_bits is None else x_bits
    yb = int(rng.integers(1, 3)) if y_bits is None else y_bits
    t = int(rng.choice([2, 4])) if n_rounds is None else n_rounds
    while True:
        a0 = int(rng.integers(1, max_memory + 1))
        b0 = int(rng.integers(0, max_memory + 1))
        if a0 + b0 <= max_qubits:
            break
    a, b, c = a0, b0, 0
    messages = []
    for r in range(1, t + 1):
        alice = r % 2 == 1
        pool = (a if alice else b) + c
        msg = int(rng.integers(1, min(max_message, pool) + 1)) if pool else 0
        if alice:
            a = pool - msg
        else:
            b = pool - msg
        c = msg
        messages.append(msg)
    rounds = []
    for info in round_schedule(a0, b0, messages):
        ni = 1 << (xb if info.owner == "A" else yb)
        rounds.append(QuantumRound(info.message, np.array([haar_unitary(1 << info.pool, rng) for _ in range(ni)])))
    fw = alice_final_width(a0, b0, messages)
    d = 1 << fw
    if measurement == "projector":
        u = haar_unitary(d, rng)
        k = max(d // 2, 1)
        meas = np.array([(u[:, :k] @ u[:, :k].conj().T) for _ in range(1 << xb)])
    else:
        meas = np.array([random_effect(d, rng) for _ in range(1 << xb)])
    return QuantumProtocol(xb, yb, a0, b0, haar_vector(1 << (a0 + b0), rng), tuple(rounds), meas)


def send_input_protocol(x_bits: int, y_bits: int = 1) -> QuantumProtocol:
    """One round: Alice copies x into the message. No useful output."""
    nx = 1 << x_bits
    r1 = np.array([_perm_matrix(np.arange(nx) ^ x) for x in range(nx)])
    theta = np.zeros(nx)
    theta[0] = 1
    return QuantumProtocol(x_bits, y_bits, x_bits, 0, theta, (QuantumRound(x_bits, r1),),
                           np.full((1, 1), 0.5))


# --------------------------------------------------------------------------
# distances between per-input states


def side_labels(side: str, r: int) -> tuple[str, ...]:
    """Registers held by ``side`` ('A' or 'B') right after message ``r`` arrives."""
    if r == 0:
        return (side,)
    receiver = "B" if r % 2 == 1 else "A"
    return (side, "C") if side == receiver else (side,)


def receiver_marginal(state: PureState, side: str, r: int):
    labels = [lab for lab in side_labels(side, r) if lab in state.layout]
    return partial_trace(state, labels) if labels else None


def cut_and_paste_terms(p: QuantumProtocol, u: int, u2: int, v: int, v2: int, r: int | None = None):
    """Both sides of the quantum cut-and-paste bound up to round ``r``.

    Returns ``(lhs, h)`` with ``lhs = B(Psi_{r,A'}^{u2,v}, Psi_{r,A'}^{u2,v2})``
    and ``h[k-1]`` the round-k terms, so the bound reads ``lhs <= 2 sum(h)``.
    """
    from .kernel import bures

    r = p.n_rounds if r is None else r
    s_uv = input_states(p, u, v)
    s_u2v = input_states(p, u2, v)
    s_uv2 = input_states(p, u, v2)
    s_u2v2 = input_states(p, u2, v2)
    h = []
    for k in range(1, r + 1):
        if k % 2 == 1:
            h.append(_bures_or_zero(s_uv[k], s_u2v[k], "B", k, bures))
        else:
            h.append(_bures_or_zero(s_uv[k], s_uv2[k], "A", k, bures))
    lhs = _bures_or_zero(s_u2v[r], s_u2v2[r], "A", r, bures)
    return lhs, h


def _bures_or_zero(s1, s2, side, r, bures):
    a, b = receiver_marginal(s1, side, r), receiver_marginal(s2, side, r)
    return 0.0 if a is None else bures(a, b)


def final_alice_state(p: QuantumProtocol, x: int, y: int):
    """Theta_t^{x,y} restricted to Alice's final registers A_t C_t."""
    final = input_states(p, x, y)[-1]
    keep = [lab for lab in ("A", "C") if lab in final.layout]
    return partial_trace(final, keep)
