"""Sequential measurement probabilities under competing composition rules.

Time convention for measurement chains: the state is fixed at time 0 and a
projector measured at time ``t`` is moved to the Heisenberg picture as
``U(t)^H P U(t)`` with ``U(t) = exp(itH)``. Equivalently the state evolves
as ``psi -> U(t) psi`` between measurements.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .hilbert import (
    HermitianOperator,
    PovmEffect,
    Projector,
    QuantumState,
    as_hermitian,
    as_projector,
    as_state,
    spectral_decompose,
    unitary_from_hamiltonian,
)
from .logic import check_complete_basis

TOL_CLIP = 1e-9
TOL_ROW = 1e-9


def clip_probability(p: float, tol: float = TOL_CLIP) -> float:
    """Clip round-off into [0, 1]; anything further out is a logic error."""
    p = float(np.real(p))
    if not (-tol <= p <= 1 + tol):
        raise ValueError(f"probability {p!r} outside [0, 1] beyond tolerance {tol}")
    return min(1.0, max(0.0, p))


def _trace_product(rho: np.ndarray, e: np.ndarray) -> complex:
    return complex(np.einsum("ij,ji->", rho, e))


def born_probability(state, effect) -> float:
    """``tr(rho E)``, or ``<a|E|a>`` for a vector state."""
    state = as_state(state)
    e = effect if isinstance(effect, PovmEffect) else PovmEffect(effect)
    if e.dim != state.dim:
        raise ValueError(f"dimension mismatch: {e.dim} vs {state.dim}")
    if state.vector is not None:
        a = state.vector
        return clip_probability(np.vdot(a, e.matrix @ a).real)
    return clip_probability(_trace_product(state.density, e.matrix).real)


def reduce_state(state, projector):
    """Ideal state reduction ``rho -> P rho P / tr(P rho P)``.

    Returns ``(probability, post_state)``; ``post_state`` is ``None`` when the
    outcome has zero probability.
    """
    state = as_state(state)
    p = as_projector(projector).matrix
    if state.vector is not None:
        v = p @ state.vector
        prob = float(np.vdot(v, v).real)
        if prob <= 0:
            return 0.0, None
        return clip_probability(prob), QuantumState(vector=v / np.sqrt(prob))
    r = p @ state.density @ p
    prob = float(np.trace(r).real)
    if prob <= 0:
        return 0.0, None
    return clip_probability(prob), QuantumState(density=r / prob)


def heisenberg_projector(P, H, t: float) -> np.ndarray:
    """``U(t)^H P U(t)`` with ``U(t) = exp(itH)`` (matrix, not re-certified)."""
    p = np.asarray(P)
    if H is None or t == 0:
        return p
    u = unitary_from_hamiltonian(H, t).matrix
    return u.conj().T @ p @ u


@dataclass(frozen=True)
class MeasurementChain:
    """Initial condition plus an ordered list of ``(projector, time)`` steps.

    ``initial`` is either a :class:`QuantumState` or a projector playing the
    role of the first outcome (the state is then ``P / tr P``). Times must be
    nondecreasing when a Hamiltonian is given; equal times mean immediate
    repetition.
    """

    initial: QuantumState | Projector
    steps: tuple
    hamiltonian: HermitianOperator | None = None

    def __init__(self, initial, steps, hamiltonian=None):
        if isinstance(initial, Projector):
            init = initial
        elif isinstance(initial, QuantumState):
            init = initial
        else:
            init = as_state(initial)
        st = []
        for item in steps:
            if isinstance(item, (tuple, list)):
                p, t = item
            else:
                p, t = item, 0.0
            st.append((as_projector(p), float(t)))
        h = None if hamiltonian is None else as_hermitian(hamiltonian)
        dims = {init.dim} | {p.dim for p, _ in st}
        if h is not None:
            dims.add(h.dim)
        if len(dims) != 1:
            raise ValueError(f"dimension mismatch in chain: {sorted(dims)}")
        times = [t for _, t in st]
        if h is not None and any(b < a for a, b in zip(times, times[1:])):
            raise ValueError("step times must be nondecreasing")
        object.__setattr__(self, "initial", init)
        object.__setattr__(self, "steps", tuple(st))
        object.__setattr__(self, "hamiltonian", h)

    @property
    def dim(self) -> int:
        return self.initial.dim

    @property
    def times(self) -> list[float]:
        return [t for _, t in self.steps]

    def initial_rho(self) -> np.ndarray:
        if isinstance(self.initial, Projector):
            tr = np.trace(self.initial.matrix).real
            if tr <= 0.5:
                raise ValueError("degenerate conditioning: tr P_a = 0")
            return self.initial.matrix / tr
        return self.initial.rho

    def heisenberg_steps(self) -> list[np.ndarray]:
        return [heisenberg_projector(p.matrix, self.hamiltonian, t)
                for p, t in self.steps]


def _sandwich(ops: Sequence[np.ndarray], rho: np.ndarray) -> complex:
    # tr(rho P1 P2 ... Pk ... P2 P1), built outside-in
    m = rho
    for p in ops:
        m = p @ m @ p.conj().T
    return complex(np.trace(m))


def wigner_chain(chain: MeasurementChain) -> float:
    """Two-sided nested projector product for an ideal measurement sequence.

    For a vector initial state ``a`` this is ``<a|P1 P2 ... Pk ... P2 P1|a>``;
    for a conditioning projector ``Pa`` it is
    ``tr(Pa P1 ... Pk ... P1) / tr Pa``.
    """
    if not chain.steps:
        raise ValueError("empty measurement chain")
    ops = chain.heisenberg_steps()
    init = chain.initial
    if isinstance(init, QuantumState) and init.vector is not None:
        v = init.vector
        for p in ops:
            v = p @ v
        return clip_probability(np.vdot(v, v).real)
    return clip_probability(_sandwich(ops, chain.initial_rho()).real)


def sequence_distribution(initial, families, times, hamiltonian=None) -> np.ndarray:
    """Joint outcome distribution of a chain of complete projector families.

    ``families[i]`` is the list of projectors measured at ``times[i]``.
    Returns an array of shape ``(len(f) for f in families)`` indexed
    lexicographically, first step most significant.
    """
    state = as_state(initial)
    ops = [[heisenberg_projector(as_projector(p).matrix, hamiltonian, t) for p in fam]
           for fam, t in zip(families, times)]
    shape = tuple(len(f) for f in ops)
    out = np.zeros(shape)
    if state.vector is not None:
        frontier = [((), state.vector)]
        for fam in ops:
            frontier = [(idx + (k,), p @ v) for idx, v in frontier for k, p in enumerate(fam)]
        for idx, v in frontier:
            out[idx] = np.vdot(v, v).real
    else:
        for idx in itertools.product(*(range(s) for s in shape)):
            out[idx] = _sandwich([ops[i][k] for i, k in enumerate(idx)], state.density).real
    return np.clip(out, 0.0, None)


@dataclass(frozen=True)
class TransitionTable:
    """Rows and columns labelled by outcomes.

    Real tables hold probabilities ``P_ab``; complex tables hold amplitudes
    ``phi_ab`` with ``|phi_ab|^2 = P_ab``.
    """

    values: np.ndarray
    row_labels: tuple = ()
    col_labels: tuple = ()

    def __post_init__(self):
        v = np.array(self.values)
        if v.ndim != 2:
            raise ValueError("transition table must be two-dimensional")
        if not np.iscomplexobj(v):
            v = v.astype(float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        if not self.row_labels:
            object.__setattr__(self, "row_labels", tuple(range(v.shape[0])))
        if not self.col_labels:
            object.__setattr__(self, "col_labels", tuple(range(v.shape[1])))
        if len(self.row_labels) != v.shape[0] or len(self.col_labels) != v.shape[1]:
            raise ValueError("label count does not match table shape")

    @property
    def is_amplitude(self) -> bool:
        return np.iscomplexobj(self.values)

    def probabilities(self) -> "TransitionTable":
        """``|phi_ab|^2`` for an amplitude table (a copy for probabilities)."""
        return TransitionTable(np.abs(self.values) ** 2, self.row_labels, self.col_labels)

    @classmethod
    def amplitudes(cls, a_vectors, b_vectors, hamiltonian=None, dt: float = 0.0):
        """``phi_ab = <b| U(dt) |a>`` for basis vectors given as columns."""
        a = np.asarray(a_vectors, dtype=complex)
        b = np.asarray(b_vectors, dtype=complex)
        if hamiltonian is not None and dt != 0:
            a = unitary_from_hamiltonian(hamiltonian, dt).matrix @ a
        return cls(a.T @ b.conj())


def _compose(t1: TransitionTable, t2: TransitionTable) -> TransitionTable:
    if t1.values.shape[1] != t2.values.shape[0]:
        raise ValueError(f"shape mismatch: {t1.values.shape} then {t2.values.shape}")
    if t1.col_labels != t2.row_labels:
        raise ValueError("intermediate outcome labels do not match")
    return TransitionTable(t1.values @ t2.values, t1.row_labels, t2.col_labels)


def markov_composition(tab_ab: TransitionTable, tab_bc: TransitionTable) -> TransitionTable:
    """Classical chaining ``P_ac = sum_b P_ab P_bc``."""
    if tab_ab.is_amplitude or tab_bc.is_amplitude:
        raise ValueError("markov_composition takes probability tables")
    return _compose(tab_ab, tab_bc)


def amplitude_composition(amp_ab: TransitionTable, amp_bc: TransitionTable) -> TransitionTable:
    """Amplitude chaining ``phi_ac = sum_b phi_ab phi_bc``."""
    a = TransitionTable(np.asarray(amp_ab.values, dtype=complex), amp_ab.row_labels, amp_ab.col_labels)
    b = TransitionTable(np.asarray(amp_bc.values, dtype=complex), amp_bc.row_labels, amp_bc.col_labels)
    return _compose(a, b)


def two_time_table(from_family, to_family, hamiltonian=None, t_from=0.0, t_to=0.0) -> np.ndarray:
    """Conditional probabilities ``tr(Pa(t_from) Pb(t_to)) / tr Pa``."""
    fa = [heisenberg_projector(as_projector(p).matrix, hamiltonian, t_from) for p in from_family]
    fb = [heisenberg_projector(as_projector(p).matrix, hamiltonian, t_to) for p in to_family]
    out = np.empty((len(fa), len(fb)))
    for i, pa in enumerate(fa):
        tr = np.trace(pa).real
        for j, pb in enumerate(fb):
            out[i, j] = clip_probability(_trace_product(pa, pb).real / tr)
    return out


@dataclass(frozen=True)
class FeynmanGap:
    p_direct: np.ndarray
    p_markov: np.ndarray
    max_abs_gap: float
    state_weights: np.ndarray | None = None
    state_gap: float | None = None


def feynman_discrepancy(a_basis, b_basis, c_basis, state=None, hamiltonian=None,
                        times=(0.0, 0.0, 0.0)) -> FeynmanGap:
    """Direct two-time probabilities against the Markov chaining through ``b``.

    ``p_direct[a, c]`` is the Born probability of ``c`` at ``t3`` given ``a``
    at ``t1`` with nothing measured in between; ``p_markov[a, c]`` sums
    ``P_ab P_bc`` over the intermediate family at ``t2``.

    If ``state`` is given, ``state_weights`` holds the distribution of ``a``
    at ``t1`` and ``state_gap`` the largest gap of the ``a``-averaged rows.
    """
    t1, t2, t3 = (float(t) for t in times)
    if hamiltonian is not None and not (t1 <= t2 <= t3):
        raise ValueError("times must satisfy t1 <= t2 <= t3")
    fa, fb, fc = (check_complete_basis(f) for f in (a_basis, b_basis, c_basis))
    p_direct = two_time_table(fa, fc, hamiltonian, t1, t3)
    p_markov = markov_composition(
        TransitionTable(two_time_table(fa, fb, hamiltonian, t1, t2)),
        TransitionTable(two_time_table(fb, fc, hamiltonian, t2, t3)),
    ).values
    gap = float(np.max(np.abs(p_direct - p_markov)))
    weights = state_gap = None
    if state is not None:
        weights = np.array([born_probability(state, heisenberg_projector(p.matrix, hamiltonian, t1))
                            for p in fa])
        state_gap = float(np.max(np.abs(weights @ (p_direct - p_markov))))
    return FeynmanGap(p_direct, np.asarray(p_markov), gap, weights, state_gap)


@dataclass(frozen=True)
class OrderingDefect:
    times: tuple
    joint: np.ndarray          # P_abc, reduction chain, shape (n, n, n)
    direct: np.ndarray         # P_ac, no intermediate measurement, shape (n, n)
    defect: np.ndarray         # |sum_b P_abc - P_ac|
    max_defect: float


@dataclass(frozen=True)
class MarkovReport:
    eigenvalues: np.ndarray
    increasing: OrderingDefect
    decreasing: OrderingDefect
    max_defect: float = field(default=0.0)


def observable_basis(observable, rtol: float = 1e-8) -> tuple[np.ndarray, list[Projector]]:
    """Eigenvalues and rank-one eigenprojectors of a nondegenerate observable."""
    parts = spectral_decompose(observable, rtol)
    if any(p.rank != 1 for _, p in parts):
        raise ValueError("observable has a degenerate spectrum; refine it to a "
                         "nondegenerate observable (or split the eigenspaces) first")
    return np.array([w for w, _ in parts]), [p for _, p in parts]


def _ordering_defect(state, family, H, times) -> OrderingDefect:
    joint = sequence_distribution(state, [family] * 3, times, H)
    direct = sequence_distribution(state, [family] * 2, (times[0], times[2]), H)
    defect = np.abs(joint.sum(axis=1) - direct)
    return OrderingDefect(tuple(times), joint, direct, defect, float(defect.max()))


def markov_violation_report(observable, H, state, times) -> MarkovReport:
    """Memory and anticipation defects for repeated observation of one observable.

    The observable is measured at three times. For each pair of boundary
    outcomes ``(a, c)`` the defect is ``|sum_b P_abc - P_ac|``, where
    ``P_abc`` comes from the ideal-reduction chain and ``P_ac`` is the
    two-time joint probability with no intermediate measurement. A process
    that kept conditional independence of ``c`` from ``a`` given ``b`` while
    also satisfying the no-measurement marginal would make this zero.

    ``times`` is ``(t1, t2, t3)`` with ``t1 < t2 < t3``; the increasing
    ordering observes at ``t1, t2, t3`` and the decreasing one at
    ``t3, t2, t1``.
    """
    t1, t2, t3 = (float(t) for t in times)
    if not (t1 < t2 < t3):
        raise ValueError("times must satisfy t1 < t2 < t3")
    evals, family = observable_basis(observable)
    state = as_state(state)
    inc = _ordering_defect(state, family, H, (t1, t2, t3))
    dec = _ordering_defect(state, family, H, (t3, t2, t1))
    return MarkovReport(evals, inc, dec, max(inc.max_defect, dec.max_defect))
