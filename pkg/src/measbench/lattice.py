"""One-particle lattice on a ring: positions, Hamiltonians, wave packets.

Two kinetic discretizations are available. ``'spectral'`` applies the exact
``k^2 / 2m`` on the discrete-Fourier grid (the default, a dense circulant);
``'fd'`` is the three-point Laplacian with dispersion
``(1 - cos(k dx)) / (m dx^2)``.

Schroedinger propagation uses ``exp(-iHt)`` so that Heisenberg positions are
``x(t) = exp(iHt) x exp(-iHt)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hilbert import HermitianOperator, QuantumState, as_hermitian, as_state, make_state

MAX_SITES = 512


@dataclass(frozen=True)
class Lattice1D:
    """``n_sites`` points spaced ``dx`` on a periodic ring.

    ``x_origin=None`` centres the lattice, so site ``j`` sits at
    ``(j - (n - 1) / 2) dx`` and the reflection ``j -> n - 1 - j`` maps
    ``x`` to ``-x`` exactly.
    """

    n_sites: int = 128
    dx: float = 1.0
    x_origin: float | None = None
    boundary: str = "periodic"

    def __post_init__(self):
        if self.n_sites < 8:
            raise ValueError("n_sites must be at least 8")
        if self.n_sites > MAX_SITES:
            raise ValueError(f"n_sites {self.n_sites} exceeds the dense cap {MAX_SITES}")
        if not self.dx > 0:
            raise ValueError("dx must be positive")
        if self.boundary != "periodic":
            raise ValueError("only periodic boundaries are supported")

    @property
    def origin(self) -> float:
        if self.x_origin is None:
            return -(self.n_sites - 1) / 2 * self.dx
        return self.x_origin

    @property
    def extent(self) -> float:
        return self.n_sites * self.dx

    def positions(self) -> np.ndarray:
        return self.origin + self.dx * np.arange(self.n_sites)

    def position_operator(self) -> HermitianOperator:
        return HermitianOperator(np.diag(self.positions()))

    def site_of(self, x: float) -> int:
        return int(np.argmin(np.abs(self.positions() - x)))

    def wavenumbers(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.n_sites, d=self.dx)

    def reflection(self) -> np.ndarray:
        """Permutation matrix of ``j -> n - 1 - j``."""
        return np.eye(self.n_sites)[::-1]

    def translation(self, shift: int = 1) -> np.ndarray:
        """Cyclic translation by ``shift`` sites (``|j> -> |j + shift>``)."""
        return np.roll(np.eye(self.n_sites), shift, axis=0)


def free_dispersion(lattice: Lattice1D, mass: float = 1.0, kinetic: str = "spectral") -> np.ndarray:
    """Kinetic energy on the discrete-Fourier grid, in ``fftfreq`` order."""
    k = lattice.wavenumbers()
    if kinetic == "spectral":
        return k ** 2 / (2 * mass)
    if kinetic == "fd":
        return (1 - np.cos(k * lattice.dx)) / (mass * lattice.dx ** 2)
    raise ValueError(f"unknown kinetic discretization {kinetic!r}")


def kinetic_matrix(lattice: Lattice1D, mass: float = 1.0, kinetic: str = "spectral") -> np.ndarray:
    if mass <= 0:
        raise ValueError("mass must be positive")
    n = lattice.n_sites
    col = np.fft.ifft(free_dispersion(lattice, mass, kinetic)).real
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return col[idx]


def build_hamiltonian(lattice: Lattice1D, potential=None, mass: float = 1.0,
                      kinetic: str = "spectral") -> HermitianOperator:
    """``p^2 / 2m + V(x)`` on the lattice; ``potential`` is per site or callable."""
    h = kinetic_matrix(lattice, mass, kinetic).astype(complex)
    if potential is not None:
        v = potential(lattice.positions()) if callable(potential) else np.asarray(potential, float)
        if v.shape != (lattice.n_sites,):
            raise ValueError("potential must have one value per site")
        h[np.diag_indices_from(h)] += v
    return HermitianOperator(h)


def oscillator_spectrum(a: float, lattice: Lattice1D, n_check: int = 5,
                        edge_fraction: float = 0.1, tail_tol: float = 1e-6,
                        kinetic: str = "spectral") -> np.ndarray:
    """Ascending eigenvalues of ``p^2 + a^2 q^2`` on the lattice.

    The lowest ``n_check`` eigenvectors must carry less than ``tail_tol``
    probability in the outer ``edge_fraction`` of the ring on each side.
    """
    if not a > 0:
        raise ValueError("a must be positive")
    h = build_hamiltonian(lattice, lambda x: a * a * x * x, mass=0.5, kinetic=kinetic)
    w, v = np.linalg.eigh(h.matrix)
    n = lattice.n_sites
    edge = max(1, int(round(edge_fraction * n)))
    tails = np.sum(np.abs(v[:edge, :n_check]) ** 2, axis=0) + \
        np.sum(np.abs(v[-edge:, :n_check]) ** 2, axis=0)
    if np.max(tails) > tail_tol:
        raise ValueError(f"lattice too small: tail mass {np.max(tails):.2g} exceeds {tail_tol:g}")
    return w


def propagate(state, H, t: float) -> QuantumState:
    """Schroedinger evolution ``exp(-iHt)``."""
    state = as_state(state)
    h = as_hermitian(H).matrix
    w, v = np.linalg.eigh(h)
    u = (v * np.exp(-1j * t * w)) @ v.conj().T
    if state.vector is not None:
        return make_state(u @ state.vector)
    return QuantumState(density=u @ state.density @ u.conj().T)


def gaussian_packet(lattice: Lattice1D, x0: float, sigma: float, k0: float = 0.0) -> QuantumState:
    """Normalized ``exp(-(x - x0)^2 / 4 sigma^2 + i k0 x)`` sampled on the sites."""
    x = lattice.positions()
    return make_state(np.exp(-((x - x0) ** 2) / (4 * sigma ** 2) + 1j * k0 * (x - x0)))
