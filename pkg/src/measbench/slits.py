"""Double slit on a 1-D lattice, with after-the-fact slit inference.

The lattice coordinate is the transverse direction and time plays the role
of the flight from the slit plane (``t = 0``) to the screen (``t =
t_screen``). A broad source packet is multiplied by two few-site
transmission profiles (Gaussian apodized, truncated at ``slit_halfwidth``
sites), renormalized, and propagated freely.

To infer the slit, straight reference paths run from each slit centre to the
detection site; the path-band probabilities of the post-slit state around
the two paths are compared.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hilbert import QuantumState, make_state
from .lattice import Lattice1D, build_hamiltonian, propagate
from .paths import PathSpec, TimeGrid, path_distance_operator, path_probability

RATIO_CAP = 1e12
PROBABILITY_FLOOR = 1e-15


@dataclass(frozen=True)
class SlitSetup:
    lattice: Lattice1D = field(default_factory=lambda: Lattice1D(129, 1.0))
    slit_a: int = 56              # site index of slit A's centre
    slit_b: int = 72
    slit_sigma: float = 1.0       # transmission profile width, in sites
    slit_halfwidth: int = 3       # profile support: centre +- halfwidth sites
    source_x0: float = 0.0
    source_sigma: float = 30.0
    source_k0: float = 0.0
    t_screen: float = 10.0
    n_times: int = 16
    screen_width: int = 1         # coarse-graining window on the screen, in sites
    eps: float = 8.0
    mass: float = 1.0

    def __post_init__(self):
        n = self.lattice.n_sites
        if self.slit_a == self.slit_b:
            raise ValueError("slits must be distinct")
        for s in (self.slit_a, self.slit_b):
            if not self.slit_halfwidth <= s < n - self.slit_halfwidth:
                raise ValueError(f"slit at site {s} does not fit inside the lattice")
        if abs(self.slit_a - self.slit_b) <= 2 * self.slit_halfwidth:
            raise ValueError("slit profiles overlap")
        if self.screen_width < 1 or self.n_times < 1 or self.t_screen <= 0:
            raise ValueError("screen_width, n_times and t_screen must be positive")

    @property
    def hamiltonian(self):
        return build_hamiltonian(self.lattice, mass=self.mass)

    @property
    def grid(self) -> TimeGrid:
        return TimeGrid(0.0, self.t_screen, self.n_times)


def transmission(setup: SlitSetup, which: str = "AB") -> np.ndarray:
    """Amplitude transmission profile of the open slits (``'A'``, ``'B'``, ``'AB'``)."""
    j = np.arange(setup.lattice.n_sites)
    out = np.zeros(setup.lattice.n_sites)
    for name, centre in (("A", setup.slit_a), ("B", setup.slit_b)):
        if name in which:
            d = j - centre
            out += np.exp(-d ** 2 / (2 * setup.slit_sigma ** 2)) * (np.abs(d) <= setup.slit_halfwidth)
    return out


def _source(setup: SlitSetup) -> np.ndarray:
    x = setup.lattice.positions()
    s = setup.source_sigma
    return np.exp(-((x - setup.source_x0) ** 2) / (4 * s * s) + 1j * setup.source_k0 * x)


def post_slit_state(setup: SlitSetup, which: str = "AB") -> QuantumState:
    """Source packet restricted by the open slits, renormalized."""
    return make_state(_source(setup) * transmission(setup, which))


def slit_amplitudes(setup: SlitSetup):
    """Screen amplitudes ``(phi_A, phi_B)`` of each slit's share of the two-slit state.

    Both shares carry the two-slit normalization, so ``phi_A + phi_B`` is the
    screen amplitude with both slits open.
    """
    raw = _source(setup)
    norm = np.linalg.norm(raw * transmission(setup, "AB"))
    h = setup.hamiltonian
    out = []
    for which in ("A", "B"):
        part = raw * transmission(setup, which) / norm
        w = np.linalg.norm(part)
        out.append(w * propagate(make_state(part), h, setup.t_screen).vector)
    return tuple(out)


def coarse_grain(p: np.ndarray, width: int) -> np.ndarray:
    """Cyclic window sums of ``width`` sites centred on each site."""
    if width == 1:
        return np.asarray(p, dtype=float)
    offsets = np.arange(width) - (width - 1) // 2
    return np.sum([np.roll(p, -o) for o in offsets], axis=0)


def screen_distribution(setup: SlitSetup, which: str = "AB") -> np.ndarray:
    """Detection probability per screen site (coarse-grained)."""
    psi = propagate(post_slit_state(setup, which), setup.hamiltonian, setup.t_screen)
    return coarse_grain(np.abs(psi.vector) ** 2, setup.screen_width)


def local_minima(p: np.ndarray, envelope: np.ndarray | None = None,
                 rel_floor: float = 0.01) -> np.ndarray:
    """Sites that are strict local minima, where ``envelope`` exceeds
    ``rel_floor`` of its maximum (``envelope`` defaults to ``p``)."""
    env = p if envelope is None else envelope
    keep = env > rel_floor * np.max(env)
    j = np.arange(1, len(p) - 1)
    is_min = (p[j] < p[j - 1]) & (p[j] < p[j + 1]) & keep[j]
    return j[is_min]


def reference_paths(setup: SlitSetup, detection_site: int) -> tuple[PathSpec, PathSpec]:
    x = setup.lattice.positions()
    g = setup.grid
    xd = x[detection_site]
    return (PathSpec.straight(g, x[setup.slit_a], xd),
            PathSpec.straight(g, x[setup.slit_b], xd))


@dataclass(frozen=True)
class SlitInference:
    detection_site: int
    p_a: float
    p_b: float
    likelihood_ratio: float
    conclusive: bool


def double_slit_inference(setup: SlitSetup, detection_site: int) -> SlitInference:
    """Likelihood ratio of passage through slit A versus slit B.

    The ratio is capped at ``RATIO_CAP``; if both probabilities fall below
    ``PROBABILITY_FLOOR`` the result is flagged inconclusive (ratio ``nan``).
    """
    if not 0 <= detection_site < setup.lattice.n_sites:
        raise ValueError("detection site is off the screen")
    state = post_slit_state(setup)
    h = setup.hamiltonian
    probs = []
    for xi in reference_paths(setup, detection_site):
        delta = path_distance_operator(h, setup.lattice, xi)
        probs.append(path_probability(state, h, setup.lattice, xi, setup.eps, delta))
    pa, pb = probs
    if pa < PROBABILITY_FLOOR and pb < PROBABILITY_FLOOR:
        return SlitInference(detection_site, pa, pb, float("nan"), False)
    ratio = RATIO_CAP if pb < PROBABILITY_FLOOR else min(pa / pb, RATIO_CAP)
    return SlitInference(detection_site, pa, pb, float(max(ratio, 1 / RATIO_CAP)), True)
