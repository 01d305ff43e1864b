"""Path distances on a lattice, the free packet, and the double slit."""

# %%
import numpy as np

from measbench import (
    Lattice1D,
    SlitSetup,
    TimeGrid,
    build_hamiltonian,
    distance_distribution,
    double_slit_inference,
    expected_path,
    gaussian_packet,
    joint_region_projector,
    oscillator_spectrum,
)
from measbench.ensembles import random_mask
from measbench.slits import local_minima, screen_distribution, slit_amplitudes

# %% A free packet follows its classical line.
lat = Lattice1D(128, 1.0)
h = build_hamiltonian(lat)
grid = TimeGrid(0.0, 16.0, 16)
a = gaussian_packet(lat, -20.0, 4.0, 0.5)
xi = expected_path(a, h, lat, grid)
print("expected path:", xi.samples[::4].round(3))

# %% Probability that the whole path stays within eps of that line.
eps = np.array([5, 10, 20, 40])
print(dict(zip(eps.tolist(), distance_distribution(a, h, lat, xi, eps).round(4).tolist())))

# %% Oscillator levels of p^2 + q^2 come out at 1, 3, 5, ...
print(oscillator_spectrum(1.0, Lattice1D(256, 0.1))[:5].round(6))

# %% Requiring a region at two different times almost always leaves nothing.
rng = np.random.default_rng(0)
ranks = [joint_region_projector(h, lat, [random_mask(rng, 128, 64) for _ in range(2)], [0.0, 10.0]).dim
         for _ in range(10)]
print("joint region ranks:", ranks)

# %% Double slit: fringes with both slits, none with one.
setup = SlitSetup()
pa, pb = slit_amplitudes(setup)
both = screen_distribution(setup)
print("two-slit minima:", len(local_minima(both, np.abs(pa) ** 2 + np.abs(pb) ** 2)),
      " single-slit minima:", len(local_minima(screen_distribution(setup, "A"))))

# %% After detection, which slit? Compare path bands around the two straight paths.
for x in (0.0, -8.0, -16.0):
    r = double_slit_inference(setup, setup.lattice.site_of(x))
    print(f"detected at x = {x:+.0f}: p_A = {r.p_a:.4f}, p_B = {r.p_b:.4f}, ratio = {r.likelihood_ratio:.3g}")
