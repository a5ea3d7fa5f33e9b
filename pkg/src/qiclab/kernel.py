"""Finite-dimensional quantum states over named qubit registers.

Every state lives on a :class:`RegisterLayout`: an ordered list of named
registers, each a block of qubits. The first declared register occupies the
most significant positions of the computational-basis index, so a layout
``[("X", 2), ("C", 1)]`` orders basis states as ``|x1 x0 c>`` with ``x``
big-endian.

Information quantities are in bits (log base 2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "RegisterLayout",
    "PureState",
    "DensityMatrix",
    "ClassicalDistribution",
    "LayoutError",
    "StateError",
    "tensor",
    "partial_trace",
    "reorder",
    "relabel",
    "split_register",
    "trace_norm",
    "fidelity",
    "trace_distance",
    "bures",
    "classical_fidelity",
    "classical_bures",
    "classical_trace_distance",
    "shannon_entropy",
    "von_neumann_entropy",
    "entropy",
    "mutual_information",
    "conditional_mutual_information",
    "basis_state",
    "classical_state",
]


class LayoutError(ValueError):
    """Unknown, duplicate or colliding register labels."""


class StateError(ValueError):
    """A state violates normalization, hermiticity or positivity."""


@dataclass(frozen=True)
class Tolerances:
    state_tol: float = 1e-9
    check_slack: float = 1e-7
    exact_tol: float = 1e-12

    def __post_init__(self):
        for name in ("state_tol", "check_slack", "exact_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class RegisterLayout:
    registers: tuple[tuple[str, int], ...]

    def __init__(self, registers: Iterable[tuple[str, int]] = ()):
        regs = tuple((str(label), int(width)) for label, width in registers)
        labels = [label for label, _ in regs]
        if len(set(labels)) != len(labels):
            raise LayoutError(f"duplicate register labels in {labels}")
        for label, width in regs:
            if width < 1:
                raise LayoutError(f"register {label!r} has width {width} < 1")
        object.__setattr__(self, "registers", regs)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.registers)

    @property
    def widths(self) -> tuple[int, ...]:
        return tuple(width for _, width in self.registers)

    @property
    def total_width(self) -> int:
        return sum(self.widths)

    @property
    def dim(self) -> int:
        return 1 << self.total_width

    def width(self, label: str) -> int:
        for lab, w in self.registers:
            if lab == label:
                return w
        raise LayoutError(f"unknown register {label!r}")

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LayoutError(f"unknown register {label!r}") from None

    def __contains__(self, label) -> bool:
        return label in self.labels

    def __len__(self) -> int:
        return len(self.registers)

    def select(self, labels: Iterable[str]) -> "RegisterLayout":
        return RegisterLayout((lab, self.width(lab)) for lab in labels)

    def __add__(self, other: "RegisterLayout") -> "RegisterLayout":
        clash = set(self.labels) & set(other.labels)
        if clash:
            raise LayoutError(f"register labels collide: {sorted(clash)}")
        return RegisterLayout(self.registers + other.registers)

    def to_dict(self):
        return [[lab, w] for lab, w in self.registers]


def _as_layout(layout) -> RegisterLayout:
    return layout if isinstance(layout, RegisterLayout) else RegisterLayout(layout)


@dataclass(frozen=True)
class PureState:
    """Normalized state vector on a register layout."""

    layout: RegisterLayout
    amplitudes: np.ndarray
    tol: float = field(default=DEFAULT_TOL.state_tol, compare=False)

    def __post_init__(self):
        layout = _as_layout(self.layout)
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != layout.dim:
            raise StateError(
                f"amplitude vector has length {amps.size}, layout needs {layout.dim}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > self.tol:
            raise StateError(f"state norm {norm!r} differs from 1")
        amps.setflags(write=False)
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "amplitudes", amps)

    def tensor_view(self) -> np.ndarray:
        """Amplitudes reshaped with one axis per register."""
        return self.amplitudes.reshape([1 << w for w in self.layout.widths])

    def density_matrix(self) -> "DensityMatrix":
        psi = self.amplitudes
        return DensityMatrix(self.layout, np.outer(psi, psi.conj()), validate=False)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace matrix on a register layout.

    Validation costs an eigendecomposition; internal code that builds reduced
    states from already-valid states passes ``validate=False``.
    """

    layout: RegisterLayout
    matrix: np.ndarray
    validate: bool = field(default=True, compare=False, repr=False)
    tol: float = field(default=DEFAULT_TOL.state_tol, compare=False, repr=False)

    def __post_init__(self):
        layout = _as_layout(self.layout)
        mat = np.array(self.matrix, dtype=complex)
        if mat.shape != (layout.dim, layout.dim):
            raise StateError(f"matrix shape {mat.shape} does not match layout dim {layout.dim}")
        if self.validate:
            if np.max(np.abs(mat - mat.conj().T), initial=0.0) > self.tol:
                raise StateError("matrix is not Hermitian")
            tr = np.trace(mat).real
            if abs(tr - 1.0) > self.tol:
                raise StateError(f"trace {tr!r} differs from 1")
            lam = np.linalg.eigvalsh(mat)
            if lam[0] < -self.tol:
                raise StateError(f"negative eigenvalue {lam[0]!r}")
        mat.setflags(write=False)
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "matrix", mat)

    def tensor_view(self) -> np.ndarray:
        dims = [1 << w for w in self.layout.widths]
        return self.matrix.reshape(dims + dims)


State = Union[PureState, DensityMatrix]


@dataclass(frozen=True)
class ClassicalDistribution:
    """Finite distribution; outcomes are the index tuples of ``probs``."""

    probs: np.ndarray
    tol: float = field(default=DEFAULT_TOL.exact_tol, compare=False, repr=False)

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        if np.any(p < 0):
            raise StateError("negative probability")
        if abs(p.sum() - 1.0) > self.tol:
            raise StateError(f"probabilities sum to {p.sum()!r}")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def shape(self):
        return self.probs.shape

    @classmethod
    def uniform(cls, *shape: int) -> "ClassicalDistribution":
        return cls(np.full(shape, 1.0 / np.prod(shape)))

    def marginal(self, axes: Sequence[int]) -> np.ndarray:
        drop = tuple(i for i in range(self.probs.ndim) if i not in axes)
        return self.probs.sum(axis=drop)


# --------------------------------------------------------------------------
# construction helpers


def basis_state(layout, values: Mapping[str, int] | Sequence[int]) -> PureState:
    """Computational-basis state with one integer value per register."""
    layout = _as_layout(layout)
    if isinstance(values, Mapping):
        values = [values[lab] for lab in layout.labels]
    idx = 0
    for (lab, w), v in zip(layout.registers, values):
        if not 0 <= v < (1 << w):
            raise StateError(f"value {v} out of range for register {lab!r}")
        idx = (idx << w) | int(v)
    amps = np.zeros(layout.dim, dtype=complex)
    amps[idx] = 1.0
    return PureState(layout, amps)


def classical_state(layout, probs) -> DensityMatrix:
    """Diagonal density matrix with the given basis probabilities."""
    layout = _as_layout(layout)
    p = np.asarray(probs, dtype=float).reshape(-1)
    return DensityMatrix(layout, np.diag(p.astype(complex)))


# --------------------------------------------------------------------------
# structural operations


def tensor(a: State, b: State) -> State:
    """Tensor product; ``a``'s registers come first."""
    layout = a.layout + b.layout
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(layout, np.kron(a.amplitudes, b.amplitudes))
    ma = a.density_matrix().matrix if isinstance(a, PureState) else a.matrix
    mb = b.density_matrix().matrix if isinstance(b, PureState) else b.matrix
    return DensityMatrix(layout, np.kron(ma, mb), validate=False)


def _keep_order(layout: RegisterLayout, keep) -> list[str]:
    if isinstance(keep, str):
        keep = [keep]
    if isinstance(keep, (set, frozenset)):
        unknown = keep - set(layout.labels)
        if unknown:
            raise LayoutError(f"unknown registers {sorted(unknown)}")
        return [lab for lab in layout.labels if lab in keep]
    keep = list(keep)
    for lab in keep:
        layout.index(lab)
    if len(set(keep)) != len(keep):
        raise LayoutError(f"repeated registers in {keep}")
    return keep


def partial_trace(state: State, keep) -> DensityMatrix:
    """Reduced state on ``keep``.

    ``keep`` given as a set yields registers in declaration order; a sequence
    fixes the output order. Pure states never form the full density matrix:
    amplitudes are grouped into a ``(dim_keep, dim_traced)`` matrix ``M`` and
    the result is ``M M^dagger``.
    """
    layout = state.layout
    keep = _keep_order(layout, keep)
    kidx = [layout.index(lab) for lab in keep]
    tidx = [i for i in range(len(layout)) if i not in kidx]
    out_layout = layout.select(keep)
    dk = out_layout.dim
    if isinstance(state, PureState):
        t = np.transpose(state.tensor_view(), kidx + tidx).reshape(dk, -1)
        return DensityMatrix(out_layout, t @ t.conj().T, validate=False)
    n = len(layout)
    t = state.tensor_view()
    dt = layout.dim // dk
    t = np.transpose(t, kidx + tidx + [n + i for i in kidx] + [n + i for i in tidx])
    t = t.reshape(dk, dt, dk, dt)
    return DensityMatrix(out_layout, np.einsum("ajbj->ab", t), validate=False)


def reorder(state: State, order: Sequence[str]) -> State:
    """Same state with registers permuted into ``order`` (all labels)."""
    layout = state.layout
    if sorted(order) != sorted(layout.labels):
        raise LayoutError(f"reorder needs every label exactly once, got {list(order)}")
    perm = [layout.index(lab) for lab in order]
    new_layout = layout.select(order)
    if isinstance(state, PureState):
        amps = np.transpose(state.tensor_view(), perm).reshape(-1)
        return PureState(new_layout, amps)
    n = len(layout)
    t = np.transpose(state.tensor_view(), perm + [n + i for i in perm])
    return DensityMatrix(new_layout, t.reshape(new_layout.dim, new_layout.dim), validate=False)


def relabel(state: State, renaming: Mapping[str, str]) -> State:
    """Rename registers; amplitudes are untouched."""
    unknown = set(renaming) - set(state.layout.labels)
    if unknown:
        raise LayoutError(f"unknown registers {sorted(unknown)}")
    new = [(renaming.get(lab, lab), w) for lab, w in state.layout.registers]
    layout = RegisterLayout(new)  # raises on collisions
    if isinstance(state, PureState):
        return PureState(layout, state.amplitudes)
    return DensityMatrix(layout, state.matrix, validate=False)


def split_register(state: State, label: str, parts: Sequence[tuple[str, int]]) -> State:
    """Split one register into consecutive sub-registers (most significant first)."""
    layout = state.layout
    i = layout.index(label)
    if sum(w for _, w in parts) != layout.widths[i]:
        raise LayoutError(f"parts {parts} do not cover register {label!r}")
    regs = list(layout.registers)
    regs[i:i + 1] = [(lab, w) for lab, w in parts if w > 0]
    new_layout = RegisterLayout(regs)
    if isinstance(state, PureState):
        return PureState(new_layout, state.amplitudes)
    return DensityMatrix(new_layout, state.matrix, validate=False)


# --------------------------------------------------------------------------
# distances


def trace_norm(m) -> float:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"trace norm needs a square matrix, got shape {m.shape}")
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def _matrix(state: State) -> np.ndarray:
    return state.density_matrix().matrix if isinstance(state, PureState) else state.matrix


def _same_layout(a: State, b: State):
    if a.layout != b.layout:
        raise LayoutError(f"layouts differ: {a.layout.registers} vs {b.layout.registers}")


def _clipped_eigh(m: np.ndarray, tol: float):
    lam, vec = np.linalg.eigh(m)
    if lam.size and lam[0] < -tol:
        raise StateError(f"negative eigenvalue {lam[0]!r}")
    # eigenvalues at rounding level carry no information but their square
    # roots do not vanish; drop them
    cutoff = max(lam.size, 1) * np.finfo(float).eps * max(abs(lam[-1]) if lam.size else 0.0, 1.0)
    lam = np.where(lam > cutoff, lam, 0.0)
    return lam, vec


def _psd_sqrt(m: np.ndarray, tol: float) -> np.ndarray:
    lam, vec = _clipped_eigh(m, tol)
    return (vec * np.sqrt(lam)) @ vec.conj().T


def fidelity(rho: State, sigma: State, tol: float = DEFAULT_TOL.state_tol) -> float:
    """F(rho, sigma) = || sqrt(rho) sqrt(sigma) ||_1 (not squared)."""
    _same_layout(rho, sigma)
    f = trace_norm(_psd_sqrt(_matrix(rho), tol) @ _psd_sqrt(_matrix(sigma), tol))
    return min(f, 1.0)


def trace_distance(rho: State, sigma: State) -> float:
    _same_layout(rho, sigma)
    d = _matrix(rho) - _matrix(sigma)
    lam = np.linalg.eigvalsh((d + d.conj().T) / 2)
    return min(0.5 * float(np.sum(np.abs(lam))), 1.0)


def bures(rho: State, sigma: State, tol: float = DEFAULT_TOL.state_tol) -> float:
    return float(np.sqrt(max(0.0, 1.0 - fidelity(rho, sigma, tol))))


def _probs(p) -> np.ndarray:
    return np.asarray(p.probs if isinstance(p, ClassicalDistribution) else p, dtype=float)


def classical_fidelity(p, q) -> float:
    p, q = _probs(p), _probs(q)
    return float(np.sum(np.sqrt(p * q)))


def classical_bures(p, q) -> float:
    """Bures distance of two distributions (diagonal states).

    Uses ``1 - F = sum (sqrt p - sqrt q)^2 / 2``, which avoids cancellation
    when the distributions are close.
    """
    p, q = _probs(p), _probs(q)
    if p.shape != q.shape:
        raise ValueError(f"distribution shapes differ: {p.shape} vs {q.shape}")
    return float(np.sqrt(0.5 * np.sum((np.sqrt(p) - np.sqrt(q)) ** 2)))


def classical_trace_distance(p, q) -> float:
    p, q = _probs(p), _probs(q)
    return 0.5 * float(np.sum(np.abs(p - q)))


# --------------------------------------------------------------------------
# entropies


def shannon_entropy(p) -> float:
    p = _probs(p).reshape(-1)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def _spectrum_entropy(lam: np.ndarray, tol: float) -> float:
    if lam.size and lam[0] < -tol:
        raise StateError(f"negative eigenvalue {lam[0]!r}")
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log2(lam)))


def von_neumann_entropy(rho: State, tol: float = DEFAULT_TOL.state_tol) -> float:
    if isinstance(rho, PureState):
        return 0.0
    return _spectrum_entropy(np.linalg.eigvalsh(rho.matrix), tol)


def entropy(state: State, labels, tol: float = DEFAULT_TOL.state_tol) -> float:
    """Entropy of the marginal on ``labels`` (empty set gives 0).

    For pure states the smaller of the kept and traced sides is diagonalized,
    since both marginals share their nonzero spectrum.
    """
    labels = set(labels)
    layout = state.layout
    if not labels:
        return 0.0
    unknown = labels - set(layout.labels)
    if unknown:
        raise LayoutError(f"unknown registers {sorted(unknown)}")
    if isinstance(state, PureState):
        rest = set(layout.labels) - labels
        if not rest:
            return 0.0
        w_keep = sum(layout.width(lab) for lab in labels)
        if layout.total_width - w_keep < w_keep:
            labels = rest
    if len(labels) == len(layout) and isinstance(state, DensityMatrix):
        return von_neumann_entropy(state, tol)
    return von_neumann_entropy(partial_trace(state, labels), tol)


def _disjoint(*groups):
    seen = set()
    for g in groups:
        if seen & g:
            raise LayoutError(f"register sets overlap on {sorted(seen & g)}")
        seen |= g


def mutual_information(state: State, a, b, tol: float = DEFAULT_TOL.state_tol) -> float:
    """I(A:B) = S(A) + S(B) - S(AB); registers outside A and B are traced out."""
    a, b = set([a] if isinstance(a, str) else a), set([b] if isinstance(b, str) else b)
    _disjoint(a, b)
    if not a or not b:
        return 0.0
    return entropy(state, a, tol) + entropy(state, b, tol) - entropy(state, a | b, tol)


def conditional_mutual_information(state: State, a, b, c, tol: float = DEFAULT_TOL.state_tol) -> float:
    """I(A:B|C) = S(AC) + S(BC) - S(ABC) - S(C)."""
    a, b, c = (set([g] if isinstance(g, str) else g) for g in (a, b, c))
    _disjoint(a, b, c)
    if not a or not b:
        return 0.0
    return (entropy(state, a | c, tol) + entropy(state, b | c, tol)
            - entropy(state, a | b | c, tol) - entropy(state, c, tol))
