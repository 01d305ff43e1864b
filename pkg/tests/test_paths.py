import numpy as np
import pytest
from hypothesis import given, strategies as st

from measbench.ensembles import random_mask, random_state
from measbench.hilbert import QuantumState, max_norm
from measbench.lattice import Lattice1D, build_hamiltonian, gaussian_packet, propagate
from measbench.paths import (
    PathSpec,
    TimeGrid,
    distance_distribution,
    expected_path,
    heisenberg_positions,
    joint_region_projector,
    path_band_projector,
    path_distance,
    path_distance_operator,
    path_distance_squared,
    path_probability,
)

seeds = st.integers(0, 2**32 - 1)
LAT = Lattice1D(48, 1.0)
H = build_hamiltonian(LAT)
GRID = TimeGrid(0.0, 4.0, 8)


def _brute_cdf(state, h, lat, xi, eps):
    # full-spectrum oracle: square the distance eigenvalues, sum the state's weight per band
    w, v = np.linalg.eigh(path_distance_squared(h, lat, xi).matrix)
    lam = np.sqrt(np.clip(w, 0, None))
    weight = np.abs(v.conj().T @ state.vector) ** 2
    return np.array([weight[lam <= e].sum() for e in eps])


# ----- grids and path distance

def test_time_grid():
    g = TimeGrid(1.0, 3.0, 4)
    assert g.dt == 0.5
    np.testing.assert_allclose(g.times, [1.0, 1.5, 2.0, 2.5])
    with pytest.raises(ValueError):
        TimeGrid(1.0, 1.0, 4)
    with pytest.raises(ValueError):
        TimeGrid(0.0, 1.0, 0)


def test_pathspec_length_checked():
    with pytest.raises(ValueError):
        PathSpec(GRID, np.zeros(3))


def test_distance_identical_zero():
    xi = PathSpec.straight(GRID, -2, 5)
    assert path_distance(xi, xi) == 0


@given(st.floats(-10, 10), st.floats(0.1, 20), st.integers(1, 40))
def test_distance_constant_offset(delta, t_end, n):
    g = TimeGrid(0.0, t_end, n)
    xi = PathSpec.straight(g, 1.0, -3.0)
    assert path_distance(xi, xi.shifted(delta)) == pytest.approx(abs(delta) * np.sqrt(t_end), rel=1e-12)


@given(seeds, st.integers(1, 30))
def test_distance_matches_riemann_sum(seed, n):
    rng = np.random.default_rng(seed)
    g = TimeGrid(-1.0, 2.0, n)
    a, b = rng.standard_normal(n), rng.standard_normal(n)
    acc = 0.0
    for k in range(n):
        acc += (a[k] - b[k]) ** 2 * (3.0 / n)
    assert path_distance(PathSpec(g, a), PathSpec(g, b)) == pytest.approx(acc ** 0.5, abs=1e-12)


def test_distance_grid_mismatch():
    with pytest.raises(ValueError):
        path_distance(PathSpec.constant(TimeGrid(0, 1, 4), 0), PathSpec.constant(TimeGrid(0, 2, 4), 0))


# ----- distance operator

def test_distance_operator_single_time_is_abs_position():
    g = TimeGrid(0.0, 0.5, 1)
    d = path_distance_operator(H, LAT, PathSpec.constant(g, 0.0)).matrix
    np.testing.assert_allclose(d, np.sqrt(0.5) * np.diag(np.abs(LAT.positions())), atol=1e-10)


def test_distance_operator_commuting_hamiltonian_is_diagonal():
    h = np.diag(np.cos(LAT.positions()))
    xi = PathSpec.straight(GRID, -3.0, 6.0)
    d = path_distance_operator(h, LAT, xi).matrix
    x = LAT.positions()
    want = np.sqrt(GRID.dt * ((x[:, None] - xi.samples[None, :]) ** 2).sum(axis=1))
    np.testing.assert_allclose(d, np.diag(want), atol=1e-9)


def test_distance_operator_translation_covariant_away_from_wrap():
    # the nearest-neighbour kinetic keeps the wrap-site defect of x out of the central block
    lat = Lattice1D(64, 1.0)
    h = build_hamiltonian(lat, kinetic="fd")
    xi = PathSpec.straight(TimeGrid(0.0, 2.0, 4), -3.0, 4.0)
    t = lat.translation(1)
    d0 = path_distance_operator(h, lat, xi).matrix
    d1 = path_distance_operator(h, lat, xi.shifted(lat.dx)).matrix
    c = slice(16, 48)
    assert max_norm((t @ d0 @ t.T)[c, c] - d1[c, c]) <= 1e-9


def test_distance_operator_psd():
    d = path_distance_operator(H, LAT, PathSpec.straight(GRID, -5, 5))
    assert d.eigvalsh()[0] >= 0


def test_heisenberg_positions_at_zero():
    np.testing.assert_allclose(heisenberg_positions(H, LAT, [0.0])[0], np.diag(LAT.positions()), atol=1e-10)


# ----- band projector and probabilities

def test_band_projector_limits_and_steps():
    d = path_distance_operator(H, LAT, PathSpec.straight(GRID, -5, 5))
    w = d.eigvalsh()
    assert path_band_projector(d, w[-1] + 1).rank == LAT.n_sites
    assert path_band_projector(d, max(w[0] - 1e-6, 0)).rank == 0
    for e in (w[:-1] + w[1:])[::6] / 2:
        p = path_band_projector(d, e)
        assert p.rank == int(np.sum(w <= e))
        assert max_norm(p.matrix @ p.matrix - p.matrix) <= 1e-10


def test_band_projector_negative_eps():
    with pytest.raises(ValueError):
        path_band_projector(np.eye(2), -1.0)


def test_path_probability_large_eps():
    a = gaussian_packet(LAT, 0.0, 3.0, 0.5)
    assert path_probability(a, H, LAT, PathSpec.constant(GRID, 0.0), 1e6) == pytest.approx(1.0)


def test_probability_matches_full_spectrum_oracle():
    a = gaussian_packet(LAT, -4.0, 3.0, 0.5)
    xi = expected_path(a, H, LAT, GRID)
    eps = np.linspace(0, 30, 31)
    np.testing.assert_allclose(distance_distribution(a, H, LAT, xi, eps), _brute_cdf(a, H, LAT, xi, eps),
                               atol=1e-10)


@given(seeds)
def test_cdf_monotone_with_limits(seed):
    a = random_state(np.random.default_rng(seed), LAT.n_sites)
    xi = PathSpec.straight(GRID, -5.0, 5.0)
    w = path_distance_operator(H, LAT, xi).eigvalsh()
    eps = np.concatenate([[max(w[0] - 1e-3, 0)], np.linspace(w[0], w[-1], 20), [w[-1] + 1e-3]])
    cdf = distance_distribution(a, H, LAT, xi, eps)
    assert np.all(np.diff(cdf) >= -1e-12)
    assert cdf[0] == pytest.approx(0.0, abs=1e-12)
    assert cdf[-1] == pytest.approx(1.0, abs=1e-12)


def test_cdf_single_point_at_spectral_max():
    a = gaussian_packet(LAT, 0.0, 3.0)
    xi = PathSpec.constant(GRID, 0.0)
    top = path_distance_operator(H, LAT, xi).eigvalsh()[-1]
    np.testing.assert_allclose(distance_distribution(a, H, LAT, xi, [top]), [1.0], atol=1e-12)


def test_cdf_unsorted_eps():
    with pytest.raises(ValueError):
        distance_distribution(gaussian_packet(LAT, 0, 3), H, LAT, PathSpec.constant(GRID, 0), [1, 0])


def test_mirror_symmetry_preserves_probabilities():
    r = LAT.reflection()
    a = gaussian_packet(LAT, -6.0, 3.0, 0.7)
    ra = QuantumState(vector=r @ a.vector)
    xi = PathSpec.straight(GRID, -6.0, 2.0)
    mirrored = PathSpec(GRID, -xi.samples)
    eps = np.linspace(0, 25, 11)
    np.testing.assert_allclose(distance_distribution(a, H, LAT, xi, eps),
                               distance_distribution(ra, H, LAT, mirrored, eps), atol=1e-10)
    np.testing.assert_allclose(expected_path(ra, H, LAT, GRID).samples,
                               -expected_path(a, H, LAT, GRID).samples, atol=1e-10)


def test_symmetric_states_share_cdf():
    # reflection commutes with Delta for the symmetric path xi = 0
    r = LAT.reflection()
    a = gaussian_packet(LAT, -5.0, 2.0, 0.3)
    ra = QuantumState(vector=r @ a.vector)
    xi = PathSpec.constant(GRID, 0.0)
    eps = np.linspace(0, 30, 16)
    np.testing.assert_allclose(distance_distribution(a, H, LAT, xi, eps),
                               distance_distribution(ra, H, LAT, xi, eps), atol=1e-10)


# ----- expected path

def test_expected_path_position_eigenstate():
    a = np.zeros(LAT.n_sites)
    a[30] = 1
    xi = expected_path(QuantumState(vector=a), H, LAT, GRID)
    assert xi.samples[0] == pytest.approx(LAT.positions()[30], abs=1e-10)


def test_expected_path_commuting_is_constant():
    a = gaussian_packet(LAT, 3.0, 2.0, 1.0)
    xi = expected_path(a, np.diag(LAT.positions() ** 2), LAT, GRID)
    np.testing.assert_allclose(xi.samples, xi.samples[0], atol=1e-10)


def test_expected_path_free_motion():
    lat = Lattice1D(256, 0.25)
    h = build_hamiltonian(lat, mass=1.0)
    x0, k0 = -10.0, 1.0
    grid = TimeGrid(0.0, 16.0, 16)
    xi = expected_path(gaussian_packet(lat, x0, 2.0, k0), h, lat, grid)
    assert np.max(np.abs(xi.samples - (x0 + k0 * grid.times))) <= 0.02 * lat.extent


@given(st.floats(0.0, 3.0))
def test_expected_path_group_property(s):
    a = gaussian_packet(LAT, -3.0, 2.5, 0.4)
    shifted_grid = TimeGrid(s, s + 4.0, 8)
    lhs = expected_path(propagate(a, H, s), H, LAT, GRID).samples
    rhs = expected_path(a, H, LAT, shifted_grid).samples
    np.testing.assert_allclose(lhs, rhs, atol=1e-9)


# ----- joint region projector

def test_joint_region_single_time():
    mask = np.zeros(LAT.n_sites, bool)
    mask[5:17] = True
    assert joint_region_projector(H, LAT, [mask], [1.3]).dim == 12


def test_joint_region_commuting_nested_masks():
    h = np.diag(LAT.positions() ** 2)
    m1 = np.zeros(LAT.n_sites, bool)
    m1[4:30] = True
    m2 = np.zeros(LAT.n_sites, bool)
    m2[10:20] = True
    assert joint_region_projector(h, LAT, [m1, m2], [0.0, 2.0]).dim == 10


def test_joint_region_generic_is_trivial():
    rng = np.random.default_rng(7)
    lat = Lattice1D(64, 1.0)
    h = build_hamiltonian(lat)
    ranks = [joint_region_projector(h, lat, [random_mask(rng, 64, 32) for _ in range(2)], [0.0, 10.0]).dim
             for _ in range(20)]
    assert sum(r == 0 for r in ranks) >= 18


@given(seeds)
def test_joint_region_rank_bounded(seed):
    rng = np.random.default_rng(seed)
    sizes = rng.integers(1, LAT.n_sites, 2)
    masks = [random_mask(rng, LAT.n_sites, int(k)) for k in sizes]
    r = joint_region_projector(H, LAT, masks, [0.0, 0.5]).dim
    assert r <= sizes.min()


def test_joint_region_validation():
    with pytest.raises(ValueError):
        joint_region_projector(H, LAT, [np.ones(LAT.n_sites, bool)], [0.0, 1.0])
    with pytest.raises(ValueError):
        joint_region_projector(H, LAT, [np.zeros(LAT.n_sites, bool)], [0.0])


def test_distribution_agrees_with_band_probabilities():
    a = gaussian_packet(LAT, 2.0, 3.0, -0.4)
    xi = PathSpec.straight(GRID, 2.0, -2.0)
    delta = path_distance_operator(H, LAT, xi)
    w = delta.eigvalsh()
    eps = (w[:-1] + w[1:])[::5] / 2
    single = [path_probability(a, H, LAT, xi, e, delta) for e in eps]
    np.testing.assert_allclose(distance_distribution(a, H, LAT, xi, eps), single, atol=1e-12)


def test_distribution_density_state(rng):
    from measbench.ensembles import random_density
    rho = random_density(rng, LAT.n_sites)
    xi = PathSpec.constant(GRID, 0.0)
    delta = path_distance_operator(H, LAT, xi)
    w = delta.eigvalsh()
    e = (w[10] + w[11]) / 2
    assert distance_distribution(rho, H, LAT, xi, [e])[0] == pytest.approx(
        path_probability(rho, H, LAT, xi, e, delta), abs=1e-12)
