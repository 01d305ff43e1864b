"""Spin-1/2 projectors and a classical hidden-variable sphere model.

The sphere model draws a hidden unit vector ``lam`` with density
``max(0, u . lam) / pi`` on the unit sphere (``u`` is the prepared
direction) and answers every direction ``v`` with ``sign(v . lam)``. This
reproduces the quantum probability ``(1 + u . v) / 2`` for outcome +1.

Random numbers are counter based: sample ``i`` belongs to block
``i // BLOCK`` and every block owns a Philox stream keyed by the master seed
with the block index in the counter. Splitting the work across any number of
workers therefore cannot change the samples.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .hilbert import Projector

PAULI = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)

TOL_UNIT_VECTOR = 1e-12
TOL_CLOSED_FORM = 1e-12
BLOCK = 1 << 16


class InternalConsistencyError(RuntimeError):
    """Explicit matrix arithmetic disagrees with the closed form."""


def unit_vector(v, tol: float = TOL_UNIT_VECTOR) -> np.ndarray:
    u = np.asarray(v, dtype=float).reshape(3)
    if abs(u @ u - 1) > tol:
        raise ValueError(f"not a unit vector: |v|^2 = {u @ u!r}")
    return u


def normalized(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def spin_projector(u, sign: int = 1) -> Projector:
    """``(1 + sign * u . sigma) / 2``: eigenprojector of ``u . sigma``."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    u = unit_vector(u)
    return Projector((np.eye(2) + sign * np.tensordot(u, PAULI, axes=1)) / 2)


def quantum_spin_correlation(u, v) -> float:
    """``tr(P_u P_v)``, cross-checked against ``(1 + u . v) / 2``."""
    u, v = unit_vector(u), unit_vector(v)
    pu, pv = spin_projector(u).matrix, spin_projector(v).matrix
    explicit = np.trace(pu @ pv).real
    closed = 0.5 * (1 + u @ v)
    if abs(explicit - closed) > TOL_CLOSED_FORM:
        raise InternalConsistencyError(
            f"tr(P_u P_v) = {explicit!r} but (1 + u.v)/2 = {closed!r}")
    return float(explicit)


@dataclass(frozen=True)
class SphereModelConfig:
    conditioning_direction: tuple = (0.0, 0.0, 1.0)
    n_samples: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be at least 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        unit_vector(self.conditioning_direction)


@dataclass(frozen=True)
class MonteCarloEstimate:
    p_hat: float
    std_err: float
    n: int

    @classmethod
    def from_counts(cls, hits: int, n: int) -> "MonteCarloEstimate":
        p = hits / n
        return cls(p, float(np.sqrt(p * (1 - p) / n)), n)


def _frame(u: np.ndarray) -> np.ndarray:
    """Orthonormal columns ``(e1, e2, u)``."""
    a = np.array([1.0, 0, 0]) if abs(u[0]) < 0.9 else np.array([0, 1.0, 0])
    e1 = np.cross(u, a)
    e1 /= np.linalg.norm(e1)
    return np.column_stack([e1, np.cross(u, e1), u])


def _block_uniforms(seed: int, block: int, count: int) -> np.ndarray:
    bg = np.random.Philox(key=seed, counter=[0, 0, block, 0])
    return np.random.Generator(bg).random((count, 2))


def hidden_vectors(config: SphereModelConfig, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Hidden vectors for samples ``start .. stop - 1`` (shape ``(k, 3)``)."""
    stop = config.n_samples if stop is None else stop
    u = unit_vector(config.conditioning_direction)
    chunks = []
    for b in range(start // BLOCK, (stop - 1) // BLOCK + 1):
        lo = max(start, b * BLOCK) - b * BLOCK
        hi = min(stop, (b + 1) * BLOCK) - b * BLOCK
        chunks.append(_block_uniforms(config.seed, b, BLOCK)[lo:hi])
    r = np.concatenate(chunks)
    cz = np.sqrt(r[:, 0])                   # inverse CDF of the cosine density
    sz = np.sqrt(1 - r[:, 0])
    phi = 2 * np.pi * r[:, 1]
    local = np.column_stack([sz * np.cos(phi), sz * np.sin(phi), cz])
    return local @ _frame(u).T


def outcomes(lam: np.ndarray, directions) -> np.ndarray:
    """``sign(v . lam)`` per sample and direction, with ``sign(0) = +1``."""
    d = np.atleast_2d(np.asarray(directions, dtype=float))
    return np.where(lam @ d.T >= 0, 1, -1).astype(np.int8)


def sphere_sample(config: SphereModelConfig, directions) -> np.ndarray:
    """Outcome records, shape ``(n_samples, n_directions)``, entries +-1.

    All directions are answered from the same hidden vector of each sample.
    """
    return outcomes(hidden_vectors(config), directions)


def count_plus(config: SphereModelConfig, directions, workers: int = 1) -> np.ndarray:
    """Number of +1 outcomes per direction, accumulated block by block."""
    d = np.atleast_2d(np.asarray(directions, dtype=float))
    n = config.n_samples
    spans = [(s, min(n, s + BLOCK)) for s in range(0, n, BLOCK)]

    def one(span):
        return (outcomes(hidden_vectors(config, *span), d) > 0).sum(axis=0)

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(one, spans))
    else:
        parts = [one(s) for s in spans]
    return np.sum(parts, axis=0).astype(np.int64)


@dataclass(frozen=True)
class SphereRow:
    v: tuple
    p_hat: float
    p_quantum: float
    std_err: float
    z_score: float


def sphere_vs_quantum(config: SphereModelConfig, v_grid, workers: int = 1) -> list[SphereRow]:
    """Monte Carlo +1 frequency against ``tr(P_u P_v)`` for each grid direction.

    The z-score is 0 when both agree exactly (including the deterministic
    cases ``v = +-u`` where the standard error vanishes).
    """
    u = unit_vector(config.conditioning_direction)
    grid = [tuple(float(c) for c in v) for v in v_grid]
    hits = count_plus(config, grid, workers)
    rows = []
    for v, h in zip(grid, hits):
        est = MonteCarloEstimate.from_counts(int(h), config.n_samples)
        pq = quantum_spin_correlation(u, v)
        diff = est.p_hat - pq
        if est.std_err > 0:
            z = diff / est.std_err
        else:
            z = 0.0 if abs(diff) < 1e-12 else float(np.copysign(np.inf, diff))
        rows.append(SphereRow(v, est.p_hat, pq, est.std_err, float(z)))
    return rows


def direction_grid(n: int, u=(0.0, 0.0, 1.0)) -> np.ndarray:
    """``n`` directions spread over the sphere (Fibonacci lattice) including ``+-u``."""
    u = unit_vector(u)
    if n < 2:
        return u[None, :]
    i = np.arange(n)
    z = 1 - 2 * i / (n - 1)
    r = np.sqrt(np.clip(1 - z * z, 0, None))
    phi = i * np.pi * (3 - np.sqrt(5))
    local = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    return local @ _frame(u).T


def random_unit_vectors(rng: np.random.Generator, n: int) -> np.ndarray:
    return normalized(rng.standard_normal((n, 3)))


def triplewise_independent(directions, tol: float = 1e-9) -> bool:
    d = np.asarray(directions, dtype=float)
    return all(abs(np.linalg.det(d[list(c)])) > tol
               for c in itertools.combinations(range(len(d)), 3))


@dataclass(frozen=True)
class InfeasibilityResult:
    best_residual: float
    assignments_tested: int
    best_signs: tuple
    best_vector: tuple


def joint_value_infeasibility(directions, tol: float = 1e-9) -> InfeasibilityResult:
    """Smallest least-squares misfit of a single vector ``J`` to sharp values.

    For every sign pattern ``s`` the residual is ``min_J sum_i (u_i . J - s_i)^2``.
    A strictly positive minimum over all ``2^k`` patterns certifies that no
    ``J`` gives every ``u_i . J`` a value in the spectrum ``{-1, +1}``. Three
    directions are accepted as a contrast case (the residual is then zero);
    at least four are needed for a positive certificate.
    """
    d = np.asarray(directions, dtype=float)
    if d.ndim != 2 or d.shape[1] != 3 or len(d) < 3:
        raise ValueError("need at least three 3-vectors")
    for row in d:
        unit_vector(row, 1e-9)
    if not triplewise_independent(d, tol):
        raise ValueError("directions are not triplewise linearly independent")
    k = len(d)
    signs = np.array(list(itertools.product((1.0, -1.0), repeat=k))).T   # (k, 2^k)
    # design matrix has full column rank, so one pseudo-inverse serves all patterns
    J = np.linalg.pinv(d) @ signs
    res = np.sum((d @ J - signs) ** 2, axis=0)
    best = int(np.argmin(res))
    return InfeasibilityResult(float(max(res[best], 0.0)), signs.shape[1],
                               tuple(int(s) for s in signs[:, best]),
                               tuple(float(x) for x in J[:, best]))
