"""JSON formats for protocols, embedding specs and input distributions.

Registers are big-endian everywhere: the first register (and within a
register the first qubit) is the most significant bit of an index.
Complex arrays are stored with a trailing ``[re, im]`` axis; real arrays
may be given without it.

A file either describes a protocol in full or names a builtin::

    {"type": "quantum", "builtin": "copy_and_answer", "function": "eq:2"}
    {"type": "classical", "builtin": "hash_eq", "k": 2, "reps": 2}
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import classical as cl
from . import quantum as qp
from .embeddings import EmbeddingSpec, sink_embedding_spec
from .functions import function_from_name

__all__ = [
    "FormatError",
    "encode_complex",
    "decode_complex",
    "protocol_to_dict",
    "protocol_from_dict",
    "spec_to_dict",
    "spec_from_dict",
    "load_protocol",
    "save_protocol",
    "load_spec",
    "load_distribution",
    "dump_json",
]

SPARSE_FRACTION = 0.25


class FormatError(ValueError):
    pass


def encode_complex(a) -> list:
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def decode_complex(obj, ndim: int) -> np.ndarray:
    a = np.asarray(obj, dtype=float)
    if a.ndim == ndim:
        return a.astype(complex)
    if a.ndim == ndim + 1 and a.shape[-1] == 2:
        return a[..., 0] + 1j * a[..., 1]
    raise FormatError(f"expected a {ndim}-d array (optionally with a trailing [re, im] axis), got shape {a.shape}")


def _encode_blocks(b: np.ndarray) -> dict:
    nz = np.argwhere(b != 0)
    if len(nz) <= SPARSE_FRACTION * b.size:
        vals = b[tuple(nz.T)]
        entries = [[int(v), int(i), int(j), float(z.real), float(z.imag)] for (v, i, j), z in zip(nz, vals)]
        return {"sparse": {"shape": list(b.shape), "entries": entries}}
    return {"blocks": encode_complex(b)}


def _decode_sparse(d: dict) -> np.ndarray:
    out = np.zeros(tuple(d["shape"]), dtype=complex)
    for v, i, j, re, im in d["entries"]:
        out[int(v), int(i), int(j)] = complex(re, im)
    return out


# --------------------------------------------------------------------------
# protocols


def protocol_to_dict(p) -> dict:
    if isinstance(p, cl.ClassicalProtocol):
        return {
            "type": "classical",
            "n_x": p.n_x,
            "n_y": p.n_y,
            "public": p.public.tolist(),
            "private_a": p.private_a.tolist(),
            "private_b": p.private_b.tolist(),
            "rounds": [{"width": r.width, "table": r.table.tolist()} for r in p.rounds],
            "output": p.output.tolist(),
            "function": p.function,
        }
    if isinstance(p, qp.QuantumProtocol):
        meas = p.measurement
        same = bool(np.all(meas == meas[0]))
        return {
            "type": "quantum",
            "register_order": "big-endian, A then B",
            "x_bits": p.x_bits,
            "y_bits": p.y_bits,
            "a0": p.a0,
            "b0": p.b0,
            "initial_state": encode_complex(p.initial_state),
            "rounds": [{"message": r.message, **_encode_blocks(r.blocks)} for r in p.rounds],
            "measurement": encode_complex(meas[0] if same else meas),
            "function": p.function,
        }
    raise TypeError(f"cannot serialize {type(p).__name__}")


def _classical_builtin(d: dict) -> cl.ClassicalProtocol:
    name = d["builtin"]
    if name == "send_inputs":
        f = function_from_name(d["function"]) if d.get("function") else None
        return cl.send_inputs_protocol(d["x_bits"], d["y_bits"], f, bob_sends=d.get("bob_sends", "answer"))
    if name == "hash_eq":
        return cl.hash_eq_protocol(d["k"], d.get("reps", 2))
    if name == "constant":
        return cl.constant_protocol(d["n_x"], d["n_y"], d.get("width", 1), d.get("message", 0), d.get("output", 0))
    raise FormatError(f"unknown classical builtin {name!r}")


def _quantum_builtin(d: dict) -> qp.QuantumProtocol:
    name = d["builtin"]
    if name == "copy_and_answer":
        return qp.copy_and_answer_protocol(function_from_name(d["function"]))
    if name == "epr_message":
        return qp.epr_message_protocol(d["x_bits"], d["y_bits"], d.get("rounds", 2))
    if name == "send_input":
        return qp.send_input_protocol(d["x_bits"], d.get("y_bits", 1))
    raise FormatError(f"unknown quantum builtin {name!r}")


def _quantum_from_dict(d: dict) -> qp.QuantumProtocol:
    x_bits, y_bits, a0, b0 = (int(d[k]) for k in ("x_bits", "y_bits", "a0", "b0"))
    theta = d.get("initial_state", "zero")
    if theta == "zero":
        theta = np.zeros(1 << (a0 + b0), dtype=complex)
        theta[0] = 1
    else:
        theta = decode_complex(theta, 1)
    specs = d["rounds"]
    sched = qp.round_schedule(a0, b0, [int(r["message"]) for r in specs])
    rounds = []
    for r, (spec, info) in enumerate(zip(specs, sched), start=1):
        bits = x_bits if info.owner == "A" else y_bits
        if "gates" in spec:
            blocks = qp.compile_gates(spec["gates"], bits, info.pool)
        elif "blocks" in spec:
            blocks = decode_complex(spec["blocks"], 3)
        elif "sparse" in spec:
            blocks = _decode_sparse(spec["sparse"])
        elif "operator" in spec:
            blocks = qp.blocks_from_operator(decode_complex(spec["operator"], 2), bits, info.pool)
        else:
            raise FormatError(f"round {r} needs one of gates, blocks, sparse, operator")
        rounds.append(qp.QuantumRound(int(spec["message"]), blocks))
    meas = np.asarray(d["measurement"], dtype=float)
    # one matrix: (d, d) real or (d, d, 2); per input: (n, d, d, 2) only
    nd = 3 if meas.ndim == 4 else 2
    return qp.QuantumProtocol(x_bits, y_bits, a0, b0, theta, rounds, decode_complex(meas, nd), d.get("function"))


def protocol_from_dict(d: dict):
    kind = d.get("type")
    try:
        if kind == "classical":
            if "builtin" in d:
                return _classical_builtin(d)
            rounds = [cl.ClassicalRound(int(r["width"]), np.asarray(r["table"])) for r in d["rounds"]]
            return cl.ClassicalProtocol(int(d["n_x"]), int(d["n_y"]), d.get("public", [1.0]),
                                        d.get("private_a", [1.0]), d.get("private_b", [1.0]),
                                        rounds, d["output"], d.get("function"))
        if kind == "quantum":
            return _quantum_builtin(d) if "builtin" in d else _quantum_from_dict(d)
    except KeyError as e:
        raise FormatError(f"missing field {e.args[0]!r}") from None
    raise FormatError(f"protocol type must be 'classical' or 'quantum', got {kind!r}")


def load_protocol(path):
    return protocol_from_dict(json.loads(Path(path).read_text()))


def save_protocol(p, path) -> None:
    dump_json(protocol_to_dict(p), path)


# --------------------------------------------------------------------------
# embedding specs and distributions


def spec_to_dict(spec: EmbeddingSpec) -> dict:
    return {"type": "embedding", "m": spec.m, "t": spec.t, "sets": [list(s) for s in spec.sets],
            "probs": spec.probs.tolist(), "k_bound": spec.k_bound,
            "perm_a": spec.perm_a.tolist(), "perm_b": spec.perm_b.tolist()}


def spec_from_dict(d: dict) -> EmbeddingSpec:
    try:
        return EmbeddingSpec(int(d["m"]), int(d["t"]), d["sets"], d["probs"], float(d["k_bound"]),
                             d["perm_a"], d["perm_b"])
    except KeyError as e:
        raise FormatError(f"missing field {e.args[0]!r}") from None


def load_spec(ref: str) -> EmbeddingSpec:
    """``sink:m`` or a JSON file."""
    if ref.startswith("sink:"):
        return sink_embedding_spec(int(ref.partition(":")[2]))
    return spec_from_dict(json.loads(Path(ref).read_text()))


def load_distribution(ref: str, shape: tuple[int, int]) -> np.ndarray:
    """``uniform`` or a JSON file holding a matrix (or ``{"probs": matrix}``)."""
    if ref == "uniform":
        return np.full(shape, 1.0 / (shape[0] * shape[1]))
    obj = json.loads(Path(ref).read_text())
    mu = np.asarray(obj["probs"] if isinstance(obj, dict) else obj, dtype=float)
    if mu.shape != shape:
        raise FormatError(f"distribution has shape {mu.shape}, expected {shape}")
    if np.any(mu < 0) or abs(mu.sum() - 1) > 1e-9:
        raise FormatError("distribution entries must be nonnegative and sum to 1")
    return mu


def dump_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n")
