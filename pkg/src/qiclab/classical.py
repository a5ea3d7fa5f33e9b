"""Exact simulation of classical randomized two-party protocols.

A protocol is a list of rounds alternating Alice, Bob, Alice, ... Each round
is a lookup table ``table[own_input, own_private, public, prefix]`` giving the
message (an integer below ``2**width``), where ``prefix`` encodes the
transcript so far with earlier messages more significant. The output is a
lookup on the full transcript.

Everything is enumerated: information quantities are exact up to floating
point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .functions import BooleanFunction, EdgeIndexing, z_string
from .kernel import ClassicalDistribution, classical_bures, shannon_entropy

__all__ = [
    "ClassicalRound",
    "ClassicalProtocol",
    "TranscriptTable",
    "EnumerationCapError",
    "ENUMERATION_CAP",
    "enumerate_joint",
    "classical_ic",
    "worst_case_error",
    "input_errors",
    "transcript_distribution",
    "cc",
    "classical_embed",
    "random_classical_protocol",
    "constant_protocol",
    "send_inputs_protocol",
    "hash_eq_protocol",
]

ENUMERATION_CAP = 1 << 24


class EnumerationCapError(RuntimeError):
    pass


@dataclass(frozen=True)
class ClassicalRound:
    width: int
    table: np.ndarray

    def __post_init__(self):
        t = np.array(self.table, dtype=np.int64)
        if t.ndim != 4:
            raise ValueError(f"round table must be 4-d, got shape {t.shape}")
        if t.size and (t.min() < 0 or t.max() >= 1 << self.width):
            raise ValueError(f"message values exceed width {self.width}")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)


def _as_probs(p) -> np.ndarray:
    p = np.array(p, dtype=float).reshape(-1)
    if np.any(p < 0) or abs(p.sum() - 1) > 1e-12:
        raise ValueError("randomness distribution must be a probability vector")
    return p


@dataclass(frozen=True)
class ClassicalProtocol:
    n_x: int
    n_y: int
    public: np.ndarray
    private_a: np.ndarray
    private_b: np.ndarray
    rounds: tuple[ClassicalRound, ...]
    output: np.ndarray
    function: str | None = None

    def __post_init__(self):
        for name in ("public", "private_a", "private_b"):
            object.__setattr__(self, name, _as_probs(getattr(self, name)))
        rounds = tuple(self.rounds)
        object.__setattr__(self, "rounds", rounds)
        prefix = 1
        for k, rnd in enumerate(rounds):
            alice = k % 2 == 0
            want = (self.n_x if alice else self.n_y,
                    len(self.private_a if alice else self.private_b),
                    len(self.public), prefix)
            if rnd.table.shape != want:
                raise ValueError(f"round {k + 1} table has shape {rnd.table.shape}, expected {want}")
            prefix <<= rnd.width
        out = np.array(self.output, dtype=np.int64).reshape(-1)
        if out.shape != (prefix,):
            raise ValueError(f"output table needs {prefix} entries, got {out.size}")
        if np.any((out != 0) & (out != 1)):
            raise ValueError("outputs must be bits")
        out.setflags(write=False)
        object.__setattr__(self, "output", out)

    @property
    def n_transcripts(self) -> int:
        return 1 << cc(self)

    def owner(self, k: int) -> str:
        """Owner of 0-based round ``k``."""
        return "A" if k % 2 == 0 else "B"


def cc(p: ClassicalProtocol) -> int:
    return sum(r.width for r in p.rounds)


def _transcripts(p: ClassicalProtocol) -> np.ndarray:
    """Transcript index for every (x, y, r, ra, rb)."""
    n_r, n_a, n_b = len(p.public), len(p.private_a), len(p.private_b)
    size = p.n_x * p.n_y * n_r * n_a * n_b
    if size > ENUMERATION_CAP:
        raise EnumerationCapError(f"joint support {size} exceeds cap {ENUMERATION_CAP}")
    x = np.arange(p.n_x).reshape(-1, 1, 1, 1, 1)
    y = np.arange(p.n_y).reshape(1, -1, 1, 1, 1)
    r = np.arange(n_r).reshape(1, 1, -1, 1, 1)
    ra = np.arange(n_a).reshape(1, 1, 1, -1, 1)
    rb = np.arange(n_b).reshape(1, 1, 1, 1, -1)
    shape = (p.n_x, p.n_y, n_r, n_a, n_b)
    prefix = np.zeros(shape, dtype=np.int64)
    for k, rnd in enumerate(p.rounds):
        if k % 2 == 0:
            msg = rnd.table[x, ra, r, prefix]
        else:
            msg = rnd.table[y, rb, r, prefix]
        prefix = (prefix << rnd.width) | msg
    return prefix


_AXES = {"x": 0, "y": 1, "r": 2, "ra": 3, "rb": 4}


@dataclass(frozen=True)
class TranscriptTable:
    """Joint distribution of (x, y, r, ra, rb, transcript, output).

    Stored densely over (x, y, r, ra, rb); the transcript and output are
    deterministic functions of that cell.
    """

    weights: np.ndarray
    transcript: np.ndarray
    output: np.ndarray = field(repr=False)
    n_transcripts: int = 0

    def entropy(self, variables: Sequence[str]) -> float:
        """Shannon entropy (bits) of the marginal on ``variables``.

        Variable names: x, y, r, ra, rb, t (transcript), out.
        """
        variables = list(dict.fromkeys(variables))
        if not variables:
            return 0.0
        if "out" in variables and "t" in variables:
            variables.remove("out")
        axes = [_AXES[v] for v in variables if v in _AXES]
        extra = [v for v in variables if v not in _AXES]
        if not extra:
            drop = tuple(i for i in range(5) if i not in axes)
            return shannon_entropy(self.weights.sum(axis=drop))
        mask = self.weights > 0
        w = self.weights[mask]
        key = self.transcript[mask] if extra == ["t"] else self.output[self.transcript[mask]]
        radix = self.n_transcripts if extra == ["t"] else 2
        grids = np.indices(self.weights.shape, sparse=True)
        for ax in axes:
            g = np.broadcast_to(grids[ax], self.weights.shape)[mask]
            key = key * self.weights.shape[ax] + g
            radix *= self.weights.shape[ax]
            if radix >= 1 << 62:
                raise OverflowError("joint key space too large")
        _, inv = np.unique(key, return_inverse=True)
        return shannon_entropy(np.bincount(inv.reshape(-1), weights=w))

    def cmi(self, a: Sequence[str], b: Sequence[str], c: Sequence[str]) -> float:
        a, b, c = list(a), list(b), list(c)
        return (self.entropy(a + c) + self.entropy(b + c)
                - self.entropy(a + b + c) - self.entropy(c))

    def marginal_xy(self) -> np.ndarray:
        return self.weights.sum(axis=(2, 3, 4))


def _mu_array(p: ClassicalProtocol, mu) -> np.ndarray:
    mu = mu.probs if isinstance(mu, ClassicalDistribution) else np.asarray(mu, dtype=float)
    if mu.shape != (p.n_x, p.n_y):
        raise ValueError(f"input distribution has shape {mu.shape}, protocol needs {(p.n_x, p.n_y)}")
    return mu


def enumerate_joint(p: ClassicalProtocol, mu) -> TranscriptTable:
    mu = _mu_array(p, mu)
    w = (mu[:, :, None, None, None] * p.public[None, None, :, None, None]
         * p.private_a[None, None, None, :, None] * p.private_b[None, None, None, None, :])
    return TranscriptTable(w, _transcripts(p), p.output, p.n_transcripts)


def classical_ic(p: ClassicalProtocol, mu, table: TranscriptTable | None = None) -> float:
    """I(X : T | Y R R_B) + I(Y : T | X R R_A) with T the transcript."""
    table = enumerate_joint(p, mu) if table is None else table
    return (table.cmi(["x"], ["t"], ["y", "r", "rb"])
            + table.cmi(["y"], ["t"], ["x", "r", "ra"]))


def _check_function(p: ClassicalProtocol, f: BooleanFunction):
    if (1 << f.x_bits, 1 << f.y_bits) != (p.n_x, p.n_y):
        raise ValueError(f"{f.name} has domain {(1 << f.x_bits, 1 << f.y_bits)}, "
                         f"protocol has {(p.n_x, p.n_y)}")


def input_errors(p: ClassicalProtocol, f: BooleanFunction) -> np.ndarray:
    """Pr[output != f(x, y)] for every input pair, shape (n_x, n_y)."""
    _check_function(p, f)
    out = p.output[_transcripts(p)]
    x, y = np.meshgrid(np.arange(p.n_x), np.arange(p.n_y), indexing="ij")
    wrong = out != np.asarray(f.evaluate(x, y))[:, :, None, None, None]
    w = p.public[:, None, None] * p.private_a[None, :, None] * p.private_b[None, None, :]
    return np.einsum("xyrab,rab->xy", wrong.astype(float), w)


def _rational(p: np.ndarray) -> tuple[np.ndarray, int]:
    """Integer numerators over a common denominator for a probability vector."""
    fr = [Fraction(float(v)).limit_denominator(1 << 24) for v in p]
    if any(abs(float(f) - v) > 1e-15 for f, v in zip(fr, p)):
        raise ValueError("probabilities are not small-denominator rationals")
    den = math.lcm(*(f.denominator for f in fr))
    return np.array([f.numerator * (den // f.denominator) for f in fr], dtype=np.int64), den


def worst_case_error(p: ClassicalProtocol, f: BooleanFunction, exact: bool = False):
    """max over inputs of Pr[output != f(x, y)].

    With ``exact=True`` the randomness distributions are read as rationals and
    the result is a :class:`fractions.Fraction`.
    """
    if not exact:
        return float(input_errors(p, f).max())
    _check_function(p, f)
    (nr, dr), (na, da), (nb, db) = (_rational(v) for v in (p.public, p.private_a, p.private_b))
    out = p.output[_transcripts(p)]
    x, y = np.meshgrid(np.arange(p.n_x), np.arange(p.n_y), indexing="ij")
    wrong = (out != np.asarray(f.evaluate(x, y))[:, :, None, None, None]).astype(np.int64)
    num = np.einsum("xyrab,r,a,b->xy", wrong, nr, na, nb)
    return Fraction(int(num.max()), dr * da * db)


def transcript_distribution(p: ClassicalProtocol, x: int, y: int) -> ClassicalDistribution:
    """Distribution of the public view (public randomness, transcript) on input (x, y).

    Shape ``(len(public), n_transcripts)``. Including the public randomness
    keeps the rectangle structure that makes cut-and-paste an identity.
    """
    if not (0 <= x < p.n_x and 0 <= y < p.n_y):
        raise ValueError(f"input ({x}, {y}) outside protocol domain")
    n_r, n_a, n_b = len(p.public), len(p.private_a), len(p.private_b)
    r = np.arange(n_r).reshape(-1, 1, 1)
    ra = np.arange(n_a).reshape(1, -1, 1)
    rb = np.arange(n_b).reshape(1, 1, -1)
    prefix = np.zeros((n_r, n_a, n_b), dtype=np.int64)
    for k, rnd in enumerate(p.rounds):
        msg = rnd.table[x, ra, r, prefix] if k % 2 == 0 else rnd.table[y, rb, r, prefix]
        prefix = (prefix << rnd.width) | msg
    w = p.public[:, None, None] * p.private_a[None, :, None] * p.private_b[None, None, :]
    out = np.zeros((n_r, p.n_transcripts))
    rr = np.broadcast_to(r, prefix.shape)
    np.add.at(out, (rr.reshape(-1), prefix.reshape(-1)), w.reshape(-1))
    return ClassicalDistribution(out, tol=1e-9)


def cut_and_paste_sides(p: ClassicalProtocol, x, y, x2, y2) -> tuple[float, float]:
    """B(P(x,y), P(x',y')) and B(P(x,y'), P(x',y)) on public views."""
    d = {pair: transcript_distribution(p, *pair) for pair in {(x, y), (x2, y2), (x, y2), (x2, y)}}
    return (classical_bures(d[x, y], d[x2, y2]), classical_bures(d[x, y2], d[x2, y]))


# --------------------------------------------------------------------------
# protocol builders


def constant_protocol(n_x: int, n_y: int, width: int = 1, message: int = 0, output: int = 0):
    table = np.full((n_x, 1, 1, 1), message)
    out = np.full(1 << width, output)
    return ClassicalProtocol(n_x, n_y, [1.0], [1.0], [1.0], [ClassicalRound(width, table)], out)


def send_inputs_protocol(x_bits: int, y_bits: int, f: BooleanFunction | None = None,
                         bob_sends: str = "input"):
    """Alice sends x; Bob then sends y (``bob_sends='input'``), the value f(x, y)
    (``'answer'``), or nothing (``'none'``). Output is f evaluated on what was sent.
    """
    n_x, n_y = 1 << x_bits, 1 << y_bits
    rounds = [ClassicalRound(x_bits, np.arange(n_x).reshape(n_x, 1, 1, 1))]
    if bob_sends == "input":
        t = np.broadcast_to(np.arange(n_y).reshape(n_y, 1, 1, 1), (n_y, 1, 1, n_x))
        rounds.append(ClassicalRound(y_bits, t))
        xs, ys = np.divmod(np.arange(n_x * n_y), n_y)
        out = f.evaluate(xs, ys) if f is not None else np.zeros(n_x * n_y, dtype=np.int64)
    elif bob_sends == "answer":
        if f is None:
            raise ValueError("an answer round needs the function")
        ys, xs = np.meshgrid(np.arange(n_y), np.arange(n_x), indexing="ij")
        t = np.asarray(f.evaluate(xs, ys)).reshape(n_y, 1, 1, n_x)
        rounds.append(ClassicalRound(1, t))
        out = np.arange(2 * n_x) & 1
    elif bob_sends == "none":
        out = np.zeros(n_x, dtype=np.int64)
    else:
        raise ValueError(f"unknown bob_sends={bob_sends!r}")
    return ClassicalProtocol(n_x, n_y, [1.0], [1.0], [1.0], rounds, out,
                             function=None if f is None else f.name)


def random_classical_protocol(rng, max_domain: int = 4, max_rand: int = 3,
                              max_rounds: int = 3, max_width: int = 2) -> ClassicalProtocol:
    """Random lookup-table protocol with random randomness distributions."""
    from .rand import random_probs

    n_x, n_y = (int(v) for v in rng.integers(2, max_domain + 1, size=2))
    n_r, n_a, n_b = (int(v) for v in rng.integers(1, max_rand + 1, size=3))
    n_rounds = int(rng.integers(1, max_rounds + 1))
    rounds, prefix = [], 1
    for k in range(n_rounds):
        width = int(rng.integers(1, max_width + 1))
        shape = ((n_x, n_a) if k % 2 == 0 else (n_y, n_b)) + (n_r, prefix)
        rounds.append(ClassicalRound(width, rng.integers(0, 1 << width, size=shape)))
        prefix <<= width
    return ClassicalProtocol(
        n_x, n_y,
        random_probs(n_r, rng), random_probs(n_a, rng), random_probs(n_b, rng),
        rounds, rng.integers(0, 2, size=prefix))


# --------------------------------------------------------------------------
# Sink o Xor -> Eq embedding


def _embed_maps(m: int):
    """Integer inputs of Sink o Xor built from (vertex, projected bits, filler bits).

    Returns ``(xmap, ymap)`` of shape ``(m, 2**(m-1), 2**(n-m+1))``: Alice's
    coordinates on E_{v_i} are ``c``; Bob's are ``d xor z_{v_i}``; the other
    coordinates come from the filler, in ascending edge order.
    """
    idx = EdgeIndexing(m)
    n, k = idx.n_edges, m - 1
    xmap = np.zeros((m, 1 << k, 1 << (n - k)), dtype=np.int64)
    ymap = np.zeros_like(xmap)
    cs = np.arange(1 << k)
    fill = np.arange(1 << (n - k))
    for s in range(m):
        inc = idx.incident(s + 1)
        rest = [q for q in range(n) if q not in inc]
        zi = int("".join(map(str, z_string(m, s + 1))), 2)
        for vals, target in ((cs, xmap), (cs ^ zi, ymap)):
            acc = np.zeros((1 << k, 1 << (n - k)), dtype=np.int64)
            for j, q in enumerate(inc):
                acc |= ((vals[:, None] >> (k - 1 - j)) & 1) << (n - 1 - q)
            for j, q in enumerate(rest):
                acc |= ((fill[None, :] >> (n - k - 1 - j)) & 1) << (n - 1 - q)
            target[s] = acc
    return xmap, ymap


def classical_embed(p: ClassicalProtocol, m: int) -> ClassicalProtocol:
    """Protocol for Eq on m-1 bits from a protocol for Sink o Xor on m vertices.

    Public randomness picks a vertex v_i uniformly (jointly with p's own
    public randomness); each party fills the coordinates outside E_{v_i}
    with private uniform bits; Alice places c on E_{v_i}, Bob places
    d xor z_{v_i}; p is run unchanged and its output returned.
    """
    n = EdgeIndexing(m).n_edges
    if (p.n_x, p.n_y) != (1 << n, 1 << n):
        raise ValueError(f"protocol domain {(p.n_x, p.n_y)} is not Sink o Xor on m={m}")
    k = m - 1
    xmap, ymap = _embed_maps(m)
    n_fill = 1 << (n - k)
    n_r = len(p.public)
    rounds, prefix = [], 1
    for j, rnd in enumerate(p.rounds):
        alice = j % 2 == 0
        emb = xmap if alice else ymap
        n_priv = len(p.private_a if alice else p.private_b)
        # axes: own(c), fill, priv, s, r, prefix
        own = emb.transpose(1, 2, 0)[:, :, None, :, None, None]
        priv = np.arange(n_priv)[None, None, :, None, None, None]
        r = np.arange(n_r)[None, None, None, None, :, None]
        pre = np.arange(prefix)[None, None, None, None, None, :]
        t = rnd.table[own, priv, r, pre]
        rounds.append(ClassicalRound(rnd.width, t.reshape(1 << k, n_fill * n_priv, m * n_r, prefix)))
        prefix <<= rnd.width
    fill = np.full(n_fill, 1.0 / n_fill)
    name = "eq:%d" % k
    return ClassicalProtocol(
        1 << k, 1 << k,
        np.outer(np.full(m, 1.0 / m), p.public).reshape(-1),
        np.outer(fill, p.private_a).reshape(-1),
        np.outer(fill, p.private_b).reshape(-1),
        rounds, p.output, function=name)


def _parity(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=np.int64)
    out = np.zeros_like(v)
    while np.any(v):
        out ^= v & 1
        v = v >> 1
    return out


def hash_eq_protocol(k: int, reps: int = 2) -> ClassicalProtocol:
    """Eq on k bits by public random inner-product hashes.

    Alice sends <x, r_j> for ``reps`` public strings r_j; Bob answers 1 iff
    every parity matches his own. One-sided error 2**-reps on unequal inputs.
    """
    n = 1 << k
    n_r = n ** reps
    rs = np.array([[(r // n ** (reps - 1 - j)) % n for j in range(reps)] for r in range(n_r)])
    xs = np.arange(n)
    # hashes[x, r] packs the reps parities, first repetition most significant
    hashes = np.zeros((n, n_r), dtype=np.int64)
    for j in range(reps):
        hashes = (hashes << 1) | _parity(xs[:, None] & rs[None, :, j])
    r1 = ClassicalRound(reps, hashes.reshape(n, 1, n_r, 1))
    r2 = ClassicalRound(1, (hashes[:, :, None] == np.arange(1 << reps)[None, None, :])
                        .astype(np.int64).reshape(n, 1, n_r, 1 << reps))
    out = np.arange(1 << (reps + 1)) & 1
    return ClassicalProtocol(n, n, np.full(n_r, 1 / n_r), [1.0], [1.0], [r1, r2], out,
                             function=f"eq:{k}")
