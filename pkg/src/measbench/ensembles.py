"""Random states and operators drawn from standard ensembles."""

from __future__ import annotations

import numpy as np

from .hilbert import HermitianOperator, Projector, QuantumState, make_state


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed unitary (QR of a complex Ginibre matrix, phases fixed)."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_state(rng: np.random.Generator, n: int) -> QuantumState:
    return make_state(rng.standard_normal(n) + 1j * rng.standard_normal(n))


def random_density(rng: np.random.Generator, n: int, rank: int | None = None) -> QuantumState:
    k = n if rank is None else rank
    g = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
    rho = g @ g.conj().T
    return QuantumState(density=rho / np.trace(rho).real)


def random_hermitian(rng: np.random.Generator, n: int) -> HermitianOperator:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return HermitianOperator((g + g.conj().T) / 2)


def random_projector(rng: np.random.Generator, n: int, rank: int) -> Projector:
    u = random_unitary(rng, n)[:, :rank]
    return Projector(u @ u.conj().T)


def commuting_projector_pair(rng: np.random.Generator, n: int) -> tuple[Projector, Projector]:
    """Two projectors diagonal in a shared random eigenbasis."""
    u = random_unitary(rng, n)
    p = rng.integers(0, 2, n).astype(float)
    q = rng.integers(0, 2, n).astype(float)
    return (Projector((u * p) @ u.conj().T), Projector((u * q) @ u.conj().T))


def random_mask(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    m = np.zeros(n, dtype=bool)
    m[rng.choice(n, k, replace=False)] = True
    return m
