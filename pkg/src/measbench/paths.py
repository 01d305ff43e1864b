"""Path distances and path-band projectors on a lattice.

The distance of two paths over ``[t0, t_end]`` is the root of the
time-integrated squared separation, discretized as a left-endpoint Riemann
sum. Replacing one path by the Heisenberg position ``x(t)`` gives the
distance operator ``Delta = sqrt(sum_k dt (x(t_k) - xi_k)^2)``; the square is
formed first because it is manifestly positive even though the ``x(t_k)``
do not commute.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hilbert import (
    HermitianOperator,
    Projector,
    as_hermitian,
    as_state,
    expectation,
    operator_sqrt,
)
from .lattice import Lattice1D
from .logic import meet_all
from .sequences import born_probability


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid with ``n_steps`` left endpoints ``t0 + k dt`` on ``[t0, t_end)``."""

    t0: float
    t_end: float
    n_steps: int

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError("n_steps must be at least 1")
        if not self.t_end > self.t0:
            raise ValueError("t_end must exceed t0")

    @property
    def dt(self) -> float:
        return (self.t_end - self.t0) / self.n_steps

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n_steps)


@dataclass(frozen=True)
class PathSpec:
    """Real positions sampled on the points of a :class:`TimeGrid`."""

    grid: TimeGrid
    samples: np.ndarray

    def __post_init__(self):
        s = np.array(self.samples, dtype=float).reshape(-1)
        if s.shape != (self.grid.n_steps,):
            raise ValueError(f"expected {self.grid.n_steps} samples, got {s.size}")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @classmethod
    def straight(cls, grid: TimeGrid, x_start: float, x_end: float) -> "PathSpec":
        """Constant-velocity path from ``x_start`` at ``t0`` to ``x_end`` at ``t_end``."""
        frac = (grid.times - grid.t0) / (grid.t_end - grid.t0)
        return cls(grid, x_start + (x_end - x_start) * frac)

    @classmethod
    def constant(cls, grid: TimeGrid, x: float) -> "PathSpec":
        return cls(grid, np.full(grid.n_steps, float(x)))

    def shifted(self, dx: float) -> "PathSpec":
        return PathSpec(self.grid, self.samples + dx)


def path_distance(xi1: PathSpec, xi2: PathSpec) -> float:
    if xi1.grid != xi2.grid:
        raise ValueError("paths are sampled on different time grids")
    return float(np.sqrt(xi1.grid.dt * np.sum((xi1.samples - xi2.samples) ** 2)))


def heisenberg_positions(H, lattice: Lattice1D, times) -> list[np.ndarray]:
    """``x(t) = exp(iHt) x exp(-iHt)`` for each time, from one eigendecomposition."""
    h = as_hermitian(H).matrix
    if h.shape[0] != lattice.n_sites:
        raise ValueError("Hamiltonian and lattice sizes differ")
    w, v = np.linalg.eigh(h)
    x_eig = v.conj().T @ (lattice.positions()[:, None] * v)
    out = []
    for t in times:
        ph = np.exp(1j * t * w)
        out.append(v @ (ph[:, None] * x_eig * ph.conj()[None, :]) @ v.conj().T)
    return out


def path_distance_squared(H, lattice: Lattice1D, xi: PathSpec) -> HermitianOperator:
    """``sum_k dt (x(t_k) - xi_k)^2``."""
    n = lattice.n_sites
    acc = np.zeros((n, n), dtype=complex)
    for x_t, target in zip(heisenberg_positions(H, lattice, xi.grid.times), xi.samples):
        d = x_t - target * np.eye(n)
        acc += d @ d
    return HermitianOperator(xi.grid.dt * acc)


def path_distance_operator(H, lattice: Lattice1D, xi: PathSpec) -> HermitianOperator:
    """Distance of the particle path from ``xi`` as a positive operator."""
    return operator_sqrt(path_distance_squared(H, lattice, xi))


def path_band_projector(delta_op, eps: float) -> Projector:
    """Spectral projector of ``delta_op`` onto eigenvalues ``<= eps``."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    w, v = np.linalg.eigh(as_hermitian(delta_op).matrix)
    return Projector.onto(v[:, w <= eps], n=len(w))


def path_probability(state, H, lattice: Lattice1D, xi: PathSpec, eps: float,
                     delta_op=None) -> float:
    """Probability that the path lies within ``eps`` of ``xi`` (RMS sense).

    ``delta_op`` may be passed to reuse a precomputed distance operator.
    """
    delta = path_distance_operator(H, lattice, xi) if delta_op is None else delta_op
    return born_probability(state, path_band_projector(delta, eps))


def distance_distribution(state, H, lattice: Lattice1D, xi: PathSpec, eps_grid) -> np.ndarray:
    """Cumulative distribution of the path distance on an ascending ``eps`` grid."""
    eps = np.asarray(eps_grid, dtype=float)
    if np.any(np.diff(eps) < 0):
        raise ValueError("eps_grid must be ascending")
    # one eigendecomposition; cumulative band weights are monotone by construction
    w, v = np.linalg.eigh(path_distance_operator(H, lattice, xi).matrix)
    state = as_state(state)
    if state.vector is not None:
        weight = np.abs(v.conj().T @ state.vector) ** 2
    else:
        weight = np.einsum("ki,kl,li->i", v.conj(), state.density, v).real.clip(0)
    cum = np.concatenate([[0.0], np.cumsum(weight)])
    return np.minimum(cum[np.searchsorted(w, eps, side="right")], 1.0)


def expected_path(state, H, lattice: Lattice1D, grid: TimeGrid) -> PathSpec:
    """``xi(t) = <a| x(t) |a>`` sampled on the grid."""
    state = as_state(state)
    xs = heisenberg_positions(H, lattice, grid.times)
    return PathSpec(grid, [expectation(state, x).real for x in xs])


@dataclass(frozen=True)
class JointRegion:
    projector: Projector
    dim: int


def joint_region_projector(H, lattice: Lattice1D, masks, times) -> JointRegion:
    """Common range of the Heisenberg region indicators ``chi_k(x(t_k))``.

    ``masks[k]`` is a boolean site mask (nonempty) for ``times[k]``. The
    result projects onto states lying in every region at its time with
    certainty.
    """
    masks, times = list(masks), list(times)
    if not masks or len(masks) != len(times):
        raise ValueError("need one mask per time")
    h = as_hermitian(H).matrix
    w, v = np.linalg.eigh(h)
    indicators = []
    for mask, t in zip(masks, times):
        m = np.asarray(mask, dtype=bool)
        if m.shape != (lattice.n_sites,) or not m.any():
            raise ValueError("each mask must be a nonempty boolean array over the sites")
        u = (v * np.exp(1j * t * w)) @ v.conj().T
        cols = u[:, m]
        indicators.append(Projector(cols @ cols.conj().T))
    p = meet_all(indicators)
    return JointRegion(p, p.rank)
