import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import SX, SZ
from measbench.ensembles import (
    random_density,
    random_hermitian,
    random_projector,
    random_state,
    random_unitary,
)
from measbench.hilbert import Projector, QuantumState, make_state, projector_from_state
from measbench.sequences import (
    MeasurementChain,
    TransitionTable,
    amplitude_composition,
    born_probability,
    clip_probability,
    feynman_discrepancy,
    markov_composition,
    markov_violation_report,
    reduce_state,
    sequence_distribution,
    two_time_table,
    wigner_chain,
)
from measbench.spin import spin_projector

seeds = st.integers(0, 2**32 - 1)
Z = [spin_projector([0, 0, 1], s) for s in (1, -1)]
X = [spin_projector([1, 0, 0], s) for s in (1, -1)]


def _basis(rng, n):
    u = random_unitary(rng, n)
    return [projector_from_state(u[:, k]) for k in range(n)]


# ----- born_probability

def test_born_identity_effect():
    assert born_probability(make_state([0.3, 0.4j, 1]), np.eye(3)) == pytest.approx(1.0)


def test_born_basis_overlap():
    pb = projector_from_state(make_state([1, 1]))
    assert born_probability(make_state([1, 0]), pb) == pytest.approx(0.5)


@given(seeds, st.integers(1, 6))
def test_born_matches_independent_trace(seed, n):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, n)
    w, v = np.linalg.eigh(random_hermitian(rng, n).matrix)
    e = (v * np.clip(w - w.min(), 0, None) / max(np.ptp(w), 1e-300)) @ v.conj().T
    want = sum(rho.rho[i, j] * e[j, i] for i in range(n) for j in range(n)).real
    assert born_probability(rho, e) == pytest.approx(want, abs=1e-12)


def test_born_rejects_bad_effect():
    with pytest.raises(ValueError):
        born_probability(make_state([1, 0]), np.diag([1.5, 0]))


def test_clip_band():
    assert clip_probability(-5e-10) == 0.0
    assert clip_probability(1 + 5e-10) == 1.0
    with pytest.raises(ValueError):
        clip_probability(1.01)


# ----- wigner_chain

@given(seeds, st.integers(2, 6))
def test_wigner_single_step_is_born(seed, n):
    rng = np.random.default_rng(seed)
    rho, p = random_density(rng, n), random_projector(rng, n, int(rng.integers(1, n)))
    assert wigner_chain(MeasurementChain(rho, [p])) == pytest.approx(born_probability(rho, p), abs=1e-12)


@given(seeds, st.integers(2, 6))
def test_wigner_two_step_reduced_state(seed, n):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, n)
    pb = random_projector(rng, n, int(rng.integers(1, n)))
    pc = random_projector(rng, n, int(rng.integers(1, n)))
    two = wigner_chain(MeasurementChain(rho, [pb, pc]))
    # unnormalized form: tr(E1 rho E1 Pc)
    e1 = pb.matrix
    assert two == pytest.approx(np.trace(e1 @ rho.rho @ e1 @ pc.matrix).real, abs=1e-12)
    # normalized form: P(b) times the Born probability in the reduced state
    prob_b, post = reduce_state(rho, pb)
    assert two == pytest.approx(prob_b * born_probability(post, pc), abs=1e-12)


@given(seeds, st.integers(2, 6))
def test_wigner_projector_conditioning_identity(seed, n):
    rng = np.random.default_rng(seed)
    pa = random_projector(rng, n, int(rng.integers(1, n)))
    pb = random_projector(rng, n, int(rng.integers(1, n)))
    pc = random_projector(rng, n, int(rng.integers(1, n)))
    lhs = wigner_chain(MeasurementChain(pa, [pb, pc]))
    rho = pa.matrix / np.trace(pa.matrix).real
    prob_b, post = reduce_state(QuantumState(density=rho), pb)
    rhs = 0.0 if post is None else prob_b * born_probability(post, pc)
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_wigner_all_identity():
    assert wigner_chain(MeasurementChain(make_state([1, 2, 3]), [np.eye(3)] * 4)) == pytest.approx(1.0)


@given(seeds, st.floats(0, 5))
def test_wigner_immediate_repetition(seed, t):
    rng = np.random.default_rng(seed)
    a, pb, h = random_state(rng, 4), random_projector(rng, 4, 2), random_hermitian(rng, 4)
    once = wigner_chain(MeasurementChain(a, [(pb, t)], h))
    twice = wigner_chain(MeasurementChain(a, [(pb, t), (pb, t)], h))
    assert twice == pytest.approx(once, abs=1e-12)


def test_wigner_degenerate_conditioning():
    with pytest.raises(ValueError, match="degenerate conditioning"):
        wigner_chain(MeasurementChain(Projector.zero(2), [np.eye(2)]))


def test_chain_times_must_not_decrease():
    with pytest.raises(ValueError):
        MeasurementChain(make_state([1, 0]), [(Z[0], 1.0), (Z[0], 0.5)], SX)


def test_chain_dimension_mismatch():
    with pytest.raises(ValueError):
        MeasurementChain(make_state([1, 0]), [np.eye(3)])


@given(seeds, st.integers(2, 6))
def test_wigner_commuting_equals_markov_product(seed, n):
    rng = np.random.default_rng(seed)
    u = random_unitary(rng, n)
    cols = [u[:, k] for k in range(n)]
    a, b, c = (int(rng.integers(n)) for _ in range(3))
    pa, pb, pc = (projector_from_state(cols[k]) for k in (a, b, c))
    # shared eigenbasis: probabilities are Kronecker deltas
    got = wigner_chain(MeasurementChain(pa, [pb, pc]))
    assert got == pytest.approx(float(a == b) * float(b == c), abs=1e-12)


@given(seeds, st.integers(2, 4))
def test_sequence_distribution_sums_to_one(seed, n):
    rng = np.random.default_rng(seed)
    fams = [_basis(rng, n) for _ in range(3)]
    h = random_hermitian(rng, n)
    for init in (random_state(rng, n), random_density(rng, n)):
        d = sequence_distribution(init, fams, [0.0, 0.7, 1.9], h)
        assert d.shape == (n, n, n)
        assert abs(d.sum() - 1) <= 1e-8


def test_sequence_distribution_matches_wigner_chain(rng):
    h = random_hermitian(rng, 3)
    fams = [_basis(rng, 3) for _ in range(2)]
    a = random_state(rng, 3)
    d = sequence_distribution(a, fams, [0.4, 1.1], h)
    for i, j in itertools.product(range(3), repeat=2):
        w = wigner_chain(MeasurementChain(a, [(fams[0][i], 0.4), (fams[1][j], 1.1)], h))
        assert d[i, j] == pytest.approx(w, abs=1e-12)


# ----- transition tables

def test_markov_identity_table():
    tab = TransitionTable([[0.2, 0.8], [0.6, 0.4]])
    out = markov_composition(tab, TransitionTable(np.eye(2)))
    np.testing.assert_allclose(out.values, tab.values)


@given(seeds, st.integers(2, 6))
def test_markov_doubly_stochastic_rows(seed, n):
    rng = np.random.default_rng(seed)
    t1 = TransitionTable(np.abs(random_unitary(rng, n)) ** 2)
    t2 = TransitionTable(np.abs(random_unitary(rng, n)) ** 2)
    np.testing.assert_allclose(markov_composition(t1, t2).values.sum(axis=1), 1, atol=1e-12)


def test_markov_spin_tables_brute_force():
    ab = two_time_table(Z, X)
    bc = two_time_table(X, Z)
    out = markov_composition(TransitionTable(ab), TransitionTable(bc)).values
    want = np.array([[sum(ab[a, b] * bc[b, c] for b in range(2)) for c in range(2)] for a in range(2)])
    np.testing.assert_allclose(out, want, atol=1e-15)
    np.testing.assert_allclose(out, 0.5, atol=1e-15)


def test_markov_shape_mismatch():
    with pytest.raises(ValueError):
        markov_composition(TransitionTable(np.eye(2)), TransitionTable(np.eye(3)))


def test_amplitude_identity():
    amp = TransitionTable(random_unitary(np.random.default_rng(1), 3))
    out = amplitude_composition(amp, TransitionTable(np.eye(3, dtype=complex)))
    np.testing.assert_allclose(out.values, amp.values)


@given(seeds, st.integers(2, 6))
def test_amplitude_closure_unitary(seed, n):
    rng = np.random.default_rng(seed)
    c = amplitude_composition(TransitionTable(random_unitary(rng, n)),
                              TransitionTable(random_unitary(rng, n))).values
    np.testing.assert_allclose(c @ c.conj().T, np.eye(n), atol=1e-12)


def test_amplitude_table_squares_to_probabilities(rng):
    u, v = random_unitary(rng, 3), random_unitary(rng, 3)
    amp = TransitionTable.amplitudes(u, v)
    probs = two_time_table([projector_from_state(u[:, k]) for k in range(3)],
                           [projector_from_state(v[:, k]) for k in range(3)])
    np.testing.assert_allclose(amp.probabilities().values, probs, atol=1e-12)


def test_amplitude_vs_markov_noncommuting():
    ez, ex = np.eye(2), np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    direct = amplitude_composition(TransitionTable.amplitudes(ez, ex),
                                   TransitionTable.amplitudes(ex, ez)).probabilities().values
    chained = markov_composition(TransitionTable.amplitudes(ez, ex).probabilities(),
                                 TransitionTable.amplitudes(ex, ez).probabilities()).values
    assert np.max(np.abs(direct - chained)) == pytest.approx(0.5)


# ----- feynman_discrepancy

def test_feynman_spin_z_x_z():
    g = feynman_discrepancy(Z, X, Z)
    assert g.p_direct[0, 0] == pytest.approx(1.0)
    assert g.p_markov[0, 0] == pytest.approx(0.5)
    assert g.max_abs_gap == pytest.approx(0.5)


@given(seeds, st.integers(2, 5))
def test_feynman_commuting_bases_no_gap(seed, n):
    rng = np.random.default_rng(seed)
    basis = _basis(rng, n)
    perm = rng.permutation(n)
    g = feynman_discrepancy(basis, [basis[k] for k in perm], basis)
    assert g.max_abs_gap <= 1e-10


def test_feynman_commuting_with_conjugated_bases():
    # intermediate basis and H both diagonal in z: the conjugated boundary bases commute with it
    h = 0.8 * SZ
    g = feynman_discrepancy(Z, Z, Z, hamiltonian=h, times=(0.0, 0.7, 2.0))
    assert g.max_abs_gap <= 1e-10


@given(seeds)
def test_feynman_three_level_interference_term(seed):
    # source and screen states in a 3-level space; b runs over {slit A, slit B, elsewhere}
    rng = np.random.default_rng(seed)
    s = random_state(rng, 3).vector
    c = random_state(rng, 3).vector
    a_basis = [projector_from_state(q) for q in np.linalg.qr(np.column_stack([s, np.eye(3)[:, :2]]))[0].T]
    c_basis = [projector_from_state(q) for q in np.linalg.qr(np.column_stack([c, np.eye(3)[:, :2]]))[0].T]
    b_basis = [np.diag(e) for e in np.eye(3)]
    g = feynman_discrepancy(a_basis, b_basis, c_basis)
    phi = s.conj() * c      # phi_b = <s|b><b|c>
    cross = abs(phi.sum()) ** 2 - np.sum(np.abs(phi) ** 2)
    assert g.p_direct[0, 0] - g.p_markov[0, 0] == pytest.approx(cross, abs=1e-12)


def test_feynman_state_weighting():
    g = feynman_discrepancy(Z, X, Z, state=make_state([1, 0]))
    np.testing.assert_allclose(g.state_weights, [1, 0])
    assert g.state_gap == pytest.approx(0.5)


def test_feynman_incomplete_family():
    with pytest.raises(ValueError):
        feynman_discrepancy(Z, [X[0]], Z)


# ----- markov_violation_report

def _half_sin_product(omega, d1, d2):
    return 0.5 * abs(np.sin(omega * d1) * np.sin(omega * d2))


@pytest.mark.parametrize("omega,times", [(1.0, (0.0, 1.3, 2.9)), (2.0, (0.0, 0.4, 1.5)),
                                         (0.7, (0.0, np.pi / 2 / 0.7, np.pi / 0.7))])
def test_markov_defect_precession_closed_form(omega, times):
    rep = markov_violation_report(SZ, 0.5 * omega * SX, make_state([1, 0]), times)
    # a = up carries all the weight at t1 = 0; index 1 is eigenvalue +1
    want = _half_sin_product(omega, times[1] - times[0], times[2] - times[1])
    np.testing.assert_allclose(rep.increasing.defect[1], want, atol=1e-12)
    np.testing.assert_allclose(rep.increasing.defect[0], 0, atol=1e-12)
    assert rep.max_defect >= want - 1e-12


def test_markov_defect_weighted_by_initial_distribution():
    omega, (t1, t2, t3) = 1.0, (0.6, 1.7, 3.1)
    rep = markov_violation_report(SZ, 0.5 * omega * SX, make_state([1, 0]), (t1, t2, t3))
    base = _half_sin_product(omega, t2 - t1, t3 - t2)
    np.testing.assert_allclose(rep.increasing.defect[1], np.cos(omega * t1 / 2) ** 2 * base, atol=1e-12)
    np.testing.assert_allclose(rep.increasing.defect[0], np.sin(omega * t1 / 2) ** 2 * base, atol=1e-12)


def test_markov_commuting_no_defect():
    rep = markov_violation_report(SZ, 0.9 * SZ, make_state([0.6, 0.8]), (0.0, 1.0, 2.5))
    assert rep.max_defect <= 1e-10


@given(seeds, st.floats(0.1, 3), st.floats(0.1, 3), st.floats(-3, 3))
def test_markov_reversed_ordering_is_conjugate_forward(seed, d1, d2, t1):
    rng = np.random.default_rng(seed)
    h, obs, a = random_hermitian(rng, 3), random_hermitian(rng, 3), random_state(rng, 3)
    t = (t1, t1 + d1, t1 + d1 + d2)
    rep = markov_violation_report(obs, h, a, t)
    mirror = markov_violation_report(obs, -h.matrix, a, tuple(-x for x in reversed(t)))
    np.testing.assert_allclose(rep.decreasing.defect, mirror.increasing.defect, atol=1e-12)


def test_markov_degenerate_observable():
    with pytest.raises(ValueError, match="degenerate"):
        markov_violation_report(np.diag([1.0, 1, 2]), np.eye(3), make_state([1, 0, 0]), (0, 1, 2))


def test_markov_times_must_increase():
    with pytest.raises(ValueError):
        markov_violation_report(SZ, SX, make_state([1, 0]), (0.0, 2.0, 1.0))
