"""Seeded random states, unitaries and distributions.

All generators take a ``numpy.random.Generator``; :func:`make_rng` builds one
on the counter-based Philox bit generator so streams are reproducible across
platforms.
"""

from __future__ import annotations

import numpy as np

from .kernel import DensityMatrix, PureState, RegisterLayout


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Philox generator keyed by ``seed`` and an optional stream path."""
    ss = np.random.SeedSequence([int(seed), *map(int, stream)])
    return np.random.Generator(np.random.Philox(ss))


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix with phase fix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def haar_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_pure_state(layout, rng) -> PureState:
    layout = layout if isinstance(layout, RegisterLayout) else RegisterLayout(layout)
    return PureState(layout, haar_vector(layout.dim, rng))


def random_density_matrix(layout, rng, rank: int | None = None) -> DensityMatrix:
    """Random mixed state: partial trace of a Haar vector on a ``rank``-dim environment."""
    layout = layout if isinstance(layout, RegisterLayout) else RegisterLayout(layout)
    d = layout.dim
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    return DensityMatrix(layout, rho, validate=False)


def random_probs(n: int, rng, sparsity: float = 0.0) -> np.ndarray:
    """Random probability vector; with ``sparsity`` > 0 some entries are zeroed."""
    p = rng.exponential(size=n)
    if sparsity > 0:
        mask = rng.random(n) < sparsity
        if mask.all():
            mask[rng.integers(n)] = False
        p[mask] = 0.0
    return p / p.sum()


def random_effect(dim: int, rng) -> np.ndarray:
    """Random POVM element 0 <= M <= I."""
    u = haar_unitary(dim, rng)
    lam = rng.random(dim)
    return (u * lam) @ u.conj().T
