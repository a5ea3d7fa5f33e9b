"""Independent brute-force reference implementations used by the tests.

Everything here works on plain numpy arrays with explicit loops or dense
matrices, sharing no code with the package beyond the RNG.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict

import numpy as np


def dense_partial_trace(psi: np.ndarray, widths: list[int], keep: list[int]) -> np.ndarray:
    """Trace out via the full density matrix, one traced basis vector at a time."""
    rho = np.outer(psi, psi.conj())
    n = sum(widths)
    # qubit-level bookkeeping
    owner = [i for i, w in enumerate(widths) for _ in range(w)]
    kq = [q for q in range(n) if owner[q] in keep]
    kq = [q for k in keep for q in range(n) if owner[q] == k]
    tq = [q for q in range(n) if owner[q] not in keep]
    dk = 1 << len(kq)
    out = np.zeros((dk, dk), dtype=complex)

    def index(kbits, tbits):
        bits = [0] * n
        for q, b in zip(kq, kbits):
            bits[q] = b
        for q, b in zip(tq, tbits):
            bits[q] = b
        return int("".join(map(str, bits)) or "0", 2)

    for tb in itertools.product((0, 1), repeat=len(tq)):
        for i, ib in enumerate(itertools.product((0, 1), repeat=len(kq))):
            for j, jb in enumerate(itertools.product((0, 1), repeat=len(kq))):
                out[i, j] += rho[index(ib, tb), index(jb, tb)]
    return out


def entropy_bits(rho: np.ndarray) -> float:
    lam = np.linalg.eigvalsh(rho)
    lam = lam[lam > 1e-14]
    return float(-np.sum(lam * np.log2(lam)))


def sqrtm_psd(m: np.ndarray) -> np.ndarray:
    lam, v = np.linalg.eigh(m)
    return (v * np.sqrt(np.clip(lam, 0, None))) @ v.conj().T


def fidelity_dense(a: np.ndarray, b: np.ndarray) -> float:
    """F = tr sqrt(sqrt(a) b sqrt(a))."""
    s = sqrtm_psd(a)
    return float(np.sum(np.sqrt(np.clip(np.linalg.eigvalsh(s @ b @ s), 0, None))))


def h(p: float) -> float:
    return 0.0 if p in (0.0, 1.0) else -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def _entropy_counts(d: dict) -> float:
    return -sum(v * math.log2(v) for v in d.values() if v > 0)


def classical_ic_bruteforce(p, mu) -> float:
    """IC by simulating every (x, y, r, ra, rb) cell message by message."""
    joint = defaultdict(float)
    for x in range(p.n_x):
        for y in range(p.n_y):
            for r, pr in enumerate(p.public):
                for ra, pa in enumerate(p.private_a):
                    for rb, pb in enumerate(p.private_b):
                        w = mu[x, y] * pr * pa * pb
                        if w == 0:
                            continue
                        msgs = []
                        prefix = 0
                        for k, rnd in enumerate(p.rounds):
                            if k % 2 == 0:
                                m = int(rnd.table[x, ra, r, prefix])
                            else:
                                m = int(rnd.table[y, rb, r, prefix])
                            msgs.append(m)
                            prefix = (prefix << rnd.width) | m
                        joint[(x, y, r, ra, rb, tuple(msgs))] += w

    def H(idx):
        d = defaultdict(float)
        for key, w in joint.items():
            d[tuple(key[i] for i in idx)] += w
        return _entropy_counts(d)

    def cmi(a, b, c):
        return H(a + c) + H(b + c) - H(a + b + c) - H(c)

    X, Y, R, RA, RB, T = range(6)
    return cmi([X], [T], [Y, R, RB]) + cmi([Y], [T], [X, R, RA])


# --------------------------------------------------------------------------
# dense wire-level simulator for quantum protocols


def _apply_on_wires(psi: np.ndarray, n: int, wires: list[int], op: np.ndarray) -> np.ndarray:
    """Apply ``op`` to ``wires`` (first wire most significant) of an n-qubit vector."""
    t = psi.reshape([2] * n)
    rest = [q for q in range(n) if q not in wires]
    t = np.transpose(t, wires + rest).reshape(1 << len(wires), -1)
    t = (op @ t).reshape([2] * n)
    inv = np.argsort(wires + rest)
    return np.transpose(t, inv).reshape(-1)


def _controlled(blocks: np.ndarray) -> np.ndarray:
    n_in, d, _ = blocks.shape
    out = np.zeros((n_in * d, n_in * d), dtype=complex)
    for v in range(n_in):
        out[v * d:(v + 1) * d, v * d:(v + 1) * d] = blocks[v]
    return out


def wire_simulate(p, mu: np.ndarray):
    """Dense simulation returning (states, wires) per round.

    Wire groups per round: X, RX, Y, RY, A, C, B as lists of global wire ids.
    """
    xb, yb = p.x_bits, p.y_bits
    X = list(range(xb))
    RX = list(range(xb, 2 * xb))
    Y = list(range(2 * xb, 2 * xb + yb))
    RY = list(range(2 * xb + yb, 2 * xb + 2 * yb))
    base = 2 * xb + 2 * yb
    A = list(range(base, base + p.a0))
    B = list(range(base + p.a0, base + p.a0 + p.b0))
    n = base + p.a0 + p.b0
    psi = np.zeros(1 << n, dtype=complex)
    theta = np.asarray(p.initial_state)
    for x in range(1 << xb):
        for y in range(1 << yb):
            if mu[x, y] == 0:
                continue
            idx_in = (((x << xb) | x) << (2 * yb)) | (y << yb) | y
            psi[idx_in * len(theta):(idx_in + 1) * len(theta)] += np.sqrt(mu[x, y]) * theta
    C: list[int] = []
    states = [(psi.copy(), dict(X=X, RX=RX, Y=Y, RY=RY, A=list(A), C=[], B=list(B)))]
    for r, rnd in enumerate(p.rounds, start=1):
        if r % 2 == 1:
            pool = A + C
            psi = _apply_on_wires(psi, n, X + pool, _controlled(rnd.blocks))
            keep = len(pool) - rnd.message
            A, C = pool[:keep], pool[keep:]
        else:
            pool = B + C
            psi = _apply_on_wires(psi, n, Y + pool, _controlled(rnd.blocks))
            keep = len(pool) - rnd.message
            B, C = pool[:keep], pool[keep:]
        states.append((psi.copy(), dict(X=X, RX=RX, Y=Y, RY=RY, A=list(A), C=list(C), B=list(B))))
    return states, n


def _reduce(psi: np.ndarray, n: int, keep: list[int]) -> np.ndarray:
    t = psi.reshape([2] * n)
    rest = [q for q in range(n) if q not in keep]
    m = np.transpose(t, keep + rest).reshape(1 << len(keep), -1)
    if n > 10:
        return m @ m.conj().T
    rho = np.outer(psi, psi.conj()).reshape([2] * (2 * n))
    # trace over `rest` on the full density matrix (dense, independent of the M M^dagger route)
    perm = keep + rest + [n + q for q in keep] + [n + q for q in rest]
    rho = np.transpose(rho, perm).reshape(1 << len(keep), 1 << len(rest), 1 << len(keep), 1 << len(rest))
    out = np.einsum("ajbj->ab", rho)
    assert np.allclose(out, m @ m.conj().T, atol=1e-10)
    return out


def _S(psi, n, wires):
    return entropy_bits(_reduce(psi, n, sorted(wires))) if wires else 0.0


def _cmi(psi, n, a, b, c):
    return _S(psi, n, a + c) + _S(psi, n, b + c) - _S(psi, n, a + b + c) - _S(psi, n, c)


def wire_costs(p, mu):
    """(QIC, HQIC, SQIC) from the dense wire simulation."""
    states, n = wire_simulate(p, mu)
    q = hq = sq = 0.0
    for r in range(1, len(states)):
        psi, w = states[r]
        if r % 2 == 1:
            q += _cmi(psi, n, w["RX"] + w["RY"], w["C"], w["Y"] + w["B"])
            hq += _cmi(psi, n, w["X"], w["B"] + w["C"], w["Y"])
            sq += _cmi(psi, n, w["X"], w["Y"] + w["RY"] + w["B"] + w["C"], [])
        else:
            q += _cmi(psi, n, w["RX"] + w["RY"], w["C"], w["X"] + w["A"])
            hq += _cmi(psi, n, w["Y"], w["A"] + w["C"], w["X"])
            sq += _cmi(psi, n, w["Y"], w["X"] + w["RX"] + w["A"] + w["C"], [])
    return q, hq, sq


def wire_acceptance(p, x: int, y: int) -> float:
    mu = np.zeros((1 << p.x_bits, 1 << p.y_bits))
    mu[x, y] = 1
    states, n = wire_simulate(p, mu)
    psi, w = states[-1]
    final = w["A"] + (w["C"] if len(p.rounds) % 2 == 0 else [])
    rho = _reduce(psi, n, final) if final else np.ones((1, 1))
    return float(np.real(np.trace(rho @ p.measurement[x])))
