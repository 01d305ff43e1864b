"""Dense linear algebra on finite-dimensional Hilbert spaces.

Operators are thin immutable wrappers around complex numpy arrays whose
structural role (Hermitian, projector, effect, unitary) is certified once at
construction. Every function here also accepts plain arrays and wraps them.

Units: hbar = 1. Tolerance statements use the max-abs-entry norm.
"""

from __future__ import annotations

import numpy as np

TOL_HERM = 1e-10
TOL_PROJ = 1e-10
TOL_UNIT = 1e-10
TOL_STATE = 1e-10
TOL_PSD = 1e-10
DEGENERACY_RTOL = 1e-8


def max_norm(a) -> float:
    """Largest absolute entry of an array."""
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def _frozen(m: np.ndarray) -> np.ndarray:
    m.setflags(write=False)
    return m


def _square(matrix) -> np.ndarray:
    m = np.array(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValueError(f"expected a nonempty square matrix, got shape {m.shape}")
    return m


def _scaled(tol: float, m: np.ndarray) -> float:
    # absolute tolerance on unit-scale matrices, relative beyond that
    return tol * max(1.0, max_norm(m))


class HermitianOperator:
    """A Hermitian matrix, symmetrized at construction.

    Inputs within ``tol`` of Hermitian are replaced by ``(M + M^H) / 2`` so
    round-off cannot accumulate through long computations.
    """

    __slots__ = ("matrix",)

    def __init__(self, matrix, tol: float = TOL_HERM):
        m = _square(matrix)
        dev = max_norm(m - m.conj().T)
        if dev > _scaled(tol, m):
            raise ValueError(f"matrix is not Hermitian (deviation {dev:.3g})")
        self.matrix = _frozen((m + m.conj().T) / 2)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim})"

    def eigvalsh(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


class PovmEffect(HermitianOperator):
    """An effect: Hermitian with spectrum inside [0, 1]."""

    __slots__ = ()

    def __init__(self, matrix, tol: float = TOL_HERM):
        super().__init__(matrix, tol)
        w = self.eigvalsh()
        if w[0] < -tol or w[-1] > 1 + tol:
            raise ValueError(
                f"effect spectrum [{w[0]:.3g}, {w[-1]:.3g}] is outside [0, 1]")


class Projector(PovmEffect):
    """Orthogonal projector: Hermitian and idempotent."""

    __slots__ = ("rank",)

    def __init__(self, matrix, tol: float = TOL_PROJ):
        HermitianOperator.__init__(self, matrix, tol)
        m = self.matrix
        dev = max_norm(m @ m - m)
        if dev > tol:
            raise ValueError(f"matrix is not idempotent (deviation {dev:.3g})")
        self.rank = int(round(np.trace(m).real))

    @classmethod
    def onto(cls, vectors, n: int | None = None) -> "Projector":
        """Projector onto the span of the given column vectors.

        ``vectors`` is an ``(n, k)`` array; its columns need not be
        orthonormal. ``k = 0`` gives the zero projector (pass ``n``).
        """
        v = np.asarray(vectors, dtype=complex)
        if v.ndim == 1:
            v = v[:, None]
        if v.shape[1] == 0:
            dim = v.shape[0] if n is None else n
            return cls(np.zeros((dim, dim), dtype=complex))
        u, s, _ = np.linalg.svd(v, full_matrices=False)
        keep = s > s[0] * max(v.shape) * np.finfo(float).eps
        u = u[:, keep]
        return cls(u @ u.conj().T)

    @classmethod
    def zero(cls, n: int) -> "Projector":
        return cls(np.zeros((n, n), dtype=complex))

    @classmethod
    def identity(cls, n: int) -> "Projector":
        return cls(np.eye(n, dtype=complex))

    def complement(self) -> "Projector":
        return Projector(np.eye(self.dim) - self.matrix)


class Unitary:
    """A unitary matrix (``U^H U = 1`` within tolerance)."""

    __slots__ = ("matrix",)

    def __init__(self, matrix, tol: float = TOL_UNIT):
        m = _square(matrix)
        dev = max_norm(m.conj().T @ m - np.eye(m.shape[0]))
        if dev > tol:
            raise ValueError(f"matrix is not unitary (deviation {dev:.3g})")
        self.matrix = _frozen(m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __repr__(self):
        return f"Unitary(dim={self.dim})"

    @property
    def dagger(self) -> "Unitary":
        return Unitary(self.matrix.conj().T)

    def apply(self, state: "QuantumState") -> "QuantumState":
        if state.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {state.dim}")
        u = self.matrix
        if state.vector is not None:
            return QuantumState(vector=u @ state.vector)
        return QuantumState(density=u @ state.density @ u.conj().T)


class QuantumState:
    """A normalized pure state vector or a density matrix.

    Exactly one of ``vector`` and ``density`` is set. ``rho`` gives a
    density matrix in both cases.
    """

    __slots__ = ("vector", "density")

    def __init__(self, vector=None, density=None, tol: float = TOL_STATE):
        if (vector is None) == (density is None):
            raise ValueError("give exactly one of vector or density")
        self.vector = None
        self.density = None
        if vector is not None:
            v = np.array(vector, dtype=complex).reshape(-1)
            if abs(np.linalg.norm(v) - 1) > tol:
                raise ValueError("state vector is not normalized")
            self.vector = _frozen(v)
        else:
            rho = HermitianOperator(density, tol).matrix.copy()
            w = np.linalg.eigvalsh(rho)
            if w[0] < -tol:
                raise ValueError("density matrix is not positive semidefinite")
            if abs(np.trace(rho).real - 1) > tol:
                raise ValueError("density matrix does not have unit trace")
            self.density = _frozen(rho)

    @property
    def dim(self) -> int:
        return (self.vector if self.vector is not None else self.density).shape[0]

    @property
    def is_pure_vector(self) -> bool:
        return self.vector is not None

    @property
    def rho(self) -> np.ndarray:
        if self.vector is not None:
            return np.outer(self.vector, self.vector.conj())
        return self.density

    def __repr__(self):
        kind = "vector" if self.vector is not None else "density"
        return f"QuantumState({kind}, dim={self.dim})"


def make_state(amplitudes) -> QuantumState:
    """Normalize a nonzero amplitude vector into a pure state."""
    v = np.asarray(amplitudes, dtype=complex).reshape(-1)
    nrm = np.linalg.norm(v)
    if v.size == 0 or nrm == 0 or not np.isfinite(nrm):
        raise ValueError("degenerate state: amplitudes must be a finite nonzero vector")
    return QuantumState(vector=v / nrm)


def make_density(rho) -> QuantumState:
    """Validate a density matrix (Hermitian, PSD, unit trace)."""
    return QuantumState(density=rho)


def as_state(state) -> QuantumState:
    if isinstance(state, QuantumState):
        return state
    a = np.asarray(state)
    return make_state(a) if a.ndim == 1 else make_density(a)


def as_hermitian(op) -> HermitianOperator:
    return op if isinstance(op, HermitianOperator) else HermitianOperator(op)


def as_projector(op) -> Projector:
    return op if isinstance(op, Projector) else Projector(op)


def _check_dims(*ops):
    dims = {np.asarray(o).shape[0] for o in ops}
    if len(dims) != 1:
        raise ValueError(f"dimension mismatch: {sorted(dims)}")


def projector_from_state(state) -> Projector:
    """Rank-one projector ``|a><a|`` onto a pure state."""
    state = as_state(state)
    if state.vector is None:
        raise ValueError("projector_from_state needs a vector state; "
                         "use spectral_decompose for density matrices")
    a = state.vector
    return Projector(np.outer(a, a.conj()))


def spectral_decompose(op, rtol: float = DEGENERACY_RTOL):
    """Eigenvalues (ascending) with their eigenprojectors.

    Eigenvalues closer than ``rtol`` times the spectral range are merged into
    one eigenspace; the reported eigenvalue is the mean of the merged group.

    Returns
    -------
    list of (float, Projector)
    """
    m = as_hermitian(op).matrix
    w, v = np.linalg.eigh(m)
    gap = rtol * (w[-1] - w[0])
    groups, start = [], 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i] - w[i - 1] > gap:
            groups.append((start, i))
            start = i
    out = []
    for lo, hi in groups:
        vk = v[:, lo:hi]
        out.append((float(np.mean(w[lo:hi])), Projector(vk @ vk.conj().T)))
    return out


def _eigh_fn(m: np.ndarray, fn) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    return (v * fn(w)) @ v.conj().T


def unitary_from_hamiltonian(H, t: float) -> Unitary:
    """``exp(i t H)`` by spectral decomposition of ``H``."""
    h = as_hermitian(H).matrix
    return Unitary(_eigh_fn(h, lambda w: np.exp(1j * t * w)))


def evolve_heisenberg(A, H, t: float) -> HermitianOperator:
    """Heisenberg-picture operator ``exp(iHt) A exp(-iHt)``."""
    a, h = as_hermitian(A).matrix, as_hermitian(H).matrix
    _check_dims(a, h)
    u = unitary_from_hamiltonian(h, t).matrix
    return HermitianOperator(u @ a @ u.conj().T)


def operator_sqrt(op, psd: bool = True, tol: float = TOL_PSD) -> HermitianOperator:
    """Positive square root of a positive semidefinite operator.

    With ``psd=True`` eigenvalues in ``[-tol*scale, 0)`` are treated as
    round-off and clipped to zero; with ``psd=False`` no clipping happens and
    any negative eigenvalue is an error.
    """
    m = as_hermitian(op).matrix
    w, v = np.linalg.eigh(m)
    floor = -tol * max(1.0, float(np.max(np.abs(w)))) if psd else 0.0
    if w[0] < floor:
        raise ValueError(f"not positive semidefinite (min eigenvalue {w[0]:.3g})")
    s = np.sqrt(np.clip(w, 0.0, None))
    return HermitianOperator((v * s) @ v.conj().T)


def commutator_norm(A, B) -> float:
    """``||AB - BA||`` in the max-abs-entry norm."""
    a, b = np.asarray(A), np.asarray(B)
    _check_dims(a, b)
    return max_norm(a @ b - b @ a)


def expectation(state, op) -> complex:
    """``<a|M|a>`` for a vector state, ``tr(rho M)`` for a density matrix."""
    state = as_state(state)
    m = np.asarray(op)
    if m.shape[0] != state.dim:
        raise ValueError(f"dimension mismatch: {m.shape[0]} vs {state.dim}")
    if state.vector is not None:
        a = state.vector
        return complex(np.vdot(a, m @ a))
    return complex(np.trace(state.density @ m))
