"""System-plus-pointer simulation of a measurement sequence.

Each measurement step couples the system to a fresh pointer through a von
Neumann interaction ``exp(-i g tau sum_k lambda_k P_k (x) G)``, where
``{P_k}`` is the measured family ``{1 - P, P}`` with labels ``lambda = 0, 1``
and ``G`` generates the cyclic pointer shift (``exp(-iG) = S``,
``S|j> = |j+1>``). At ``g * tau = 1`` the pointer shift is exact and the
pointer records the outcome perfectly; the sweep therefore runs ``g * tau``
over ``(0, 1]``.

All pointers are read jointly at the end, and the resulting distribution is
compared with the two-sided projector chain applied to the bare system.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .hilbert import unitary_from_hamiltonian
from .sequences import MeasurementChain, sequence_distribution

DEFAULT_DIM_CAP = 4096


class CapExceededError(ValueError):
    """Composite dimension above the configured cap."""

    def __init__(self, required: int, cap: int):
        super().__init__(f"composite dimension {required} exceeds cap {cap}; "
                         f"raise the cap to at least {required}")
        self.required = required
        self.cap = cap


@dataclass(frozen=True)
class PointerModel:
    """Pointer ancilla used once per measurement step.

    ``pointer_dim=None`` means number of outcomes + 1. ``readout_basis``
    holds the readout vectors as columns (default: the computational basis,
    reading ``j`` meaning outcome label ``j``).
    """

    pointer_dim: int | None = None
    coupling_strength: float = 1.0
    coupling_duration: float = 1.0
    readout_basis: np.ndarray | None = None

    def __post_init__(self):
        if self.coupling_strength < 0:
            raise ValueError("coupling strength must be nonnegative")
        if self.pointer_dim is not None and self.pointer_dim < 2:
            raise ValueError("pointer_dim must be at least the number of outcomes (2)")

    @property
    def coupling(self) -> float:
        return self.coupling_strength * self.coupling_duration

    def resolved_dim(self, n_outcomes: int = 2) -> int:
        m = n_outcomes + 1 if self.pointer_dim is None else self.pointer_dim
        if m < n_outcomes:
            raise ValueError(f"pointer_dim {m} cannot record {n_outcomes} outcomes")
        return m


def shift_generator(m: int) -> np.ndarray:
    """Hermitian ``G`` with ``exp(-iG)`` equal to the cyclic shift on ``m`` levels."""
    j = np.arange(m)
    f = np.exp(2j * np.pi * np.outer(j, j) / m) / np.sqrt(m)   # columns: shift eigenvectors
    theta = 2 * np.pi * j / m
    theta = np.where(theta > np.pi, theta - 2 * np.pi, theta)
    return (f * theta) @ f.conj().T


def _apply(mat: np.ndarray, psi: np.ndarray, axis: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(mat, psi, axes=([1], [axis])), 0, axis)


def _pointer_unitaries(m: int, coupling: float, labels) -> list[np.ndarray]:
    w, v = np.linalg.eigh(shift_generator(m))
    return [(v * np.exp(-1j * coupling * lam * w)) @ v.conj().T for lam in labels]


def _composite_states(chain: MeasurementChain, pointer: PointerModel, cap: int):
    """Yield ``(weight, psi)`` for each eigencomponent of the initial state.

    ``psi`` has shape ``(d, m, ..., m)``: system axis first, then one axis per
    pointer in step order, after the last coupling.
    """
    d, k = chain.dim, len(chain.steps)
    m = pointer.resolved_dim(2)
    required = d * m ** k
    if required > cap:
        raise CapExceededError(required, cap)
    shifts = _pointer_unitaries(m, pointer.coupling, (0, 1))
    h = chain.hamiltonian
    w, vecs = np.linalg.eigh(chain.initial_rho())
    for weight, vec in zip(w, vecs.T):
        if weight <= 1e-15:
            continue
        psi = np.zeros((d,) + (m,) * k, dtype=complex)
        psi[(slice(None),) + (0,) * k] = vec
        t_prev = 0.0
        for i, (proj, t) in enumerate(chain.steps):
            if h is not None and t != t_prev:
                psi = _apply(unitary_from_hamiltonian(h, t - t_prev).matrix, psi, 0)
            t_prev = t
            family = (np.eye(d) - proj.matrix, proj.matrix)
            psi = sum(_apply(s, _apply(pk, psi, 0), i + 1) for pk, s in zip(family, shifts))
        yield float(weight), psi


def full_model_distribution(chain: MeasurementChain, pointer: PointerModel,
                            cap: int = DEFAULT_DIM_CAP) -> np.ndarray:
    """Joint pointer-readout distribution, shape ``(m,) * n_steps``."""
    k = len(chain.steps)
    m = pointer.resolved_dim(2)
    readout = np.eye(m) if pointer.readout_basis is None else np.asarray(pointer.readout_basis)
    if readout.shape != (m, m):
        raise ValueError(f"readout basis must be {m}x{m}")
    total = np.zeros((m,) * k)
    for weight, psi in _composite_states(chain, pointer, cap):
        for i in range(k):
            psi = _apply(readout.conj().T, psi, i + 1)
        total += weight * np.sum(np.abs(psi) ** 2, axis=0)
    return total


def wigner_distribution(chain: MeasurementChain, m: int) -> np.ndarray:
    """Projector-chain distribution over binary outcomes, embedded in ``(m,)*k``."""
    fams = [(np.eye(chain.dim) - p.matrix, p.matrix) for p, _ in chain.steps]
    joint = sequence_distribution(chain.initial_rho(), fams, chain.times, chain.hamiltonian)
    out = np.zeros((m,) * len(fams))
    out[(slice(0, 2),) * len(fams)] = joint
    return out


@dataclass(frozen=True)
class DemonComparison:
    sequences: tuple            # readout labels, lexicographic, first step most significant
    wigner: np.ndarray
    full_model: np.ndarray
    total_variation: float


def demon_compare(chain: MeasurementChain, pointer: PointerModel,
                  cap: int = DEFAULT_DIM_CAP) -> DemonComparison:
    """Pointer-recorded outcome statistics against the projector chain."""
    full = full_model_distribution(chain, pointer, cap)
    m = pointer.resolved_dim(2)
    wig = wigner_distribution(chain, m)
    seqs = tuple(itertools.product(range(m), repeat=len(chain.steps)))
    tv = 0.5 * float(np.sum(np.abs(full - wig)))
    return DemonComparison(seqs, wig.reshape(-1), full.reshape(-1), tv)


def demon_sweep(chain: MeasurementChain, couplings, pointer: PointerModel | None = None,
                cap: int = DEFAULT_DIM_CAP, workers: int = 1) -> list[tuple[float, float]]:
    """Total variation for each coupling strength ``g`` (duration from ``pointer``).

    Results are in input order whatever the number of worker threads.
    """
    base = pointer or PointerModel()

    def one(g):
        pm = PointerModel(base.pointer_dim, float(g), base.coupling_duration, base.readout_basis)
        return float(g), demon_compare(chain, pm, cap).total_variation

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            return list(ex.map(one, couplings))
    return [one(g) for g in couplings]


def system_marginal(chain: MeasurementChain, pointer: PointerModel,
                    cap: int = DEFAULT_DIM_CAP) -> np.ndarray:
    """Reduced system density matrix after the last step (pointers traced out)."""
    rho = np.zeros((chain.dim, chain.dim), dtype=complex)
    for weight, psi in _composite_states(chain, pointer, cap):
        flat = psi.reshape(chain.dim, -1)
        rho += weight * flat @ flat.conj().T
    return rho
