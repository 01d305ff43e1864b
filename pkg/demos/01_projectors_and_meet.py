"""Projectors, spectral pieces, and the subspace meet."""

# %%
import numpy as np

from measbench import Projector, commutator_norm, make_state, meet, meet_strict, spectral_decompose
from measbench.logic import ql_chain_sum_check, ql_sequence_probability
from measbench.spin import PAULI, spin_projector

# %% Spectral decomposition merges degenerate eigenvalues into one projector.
for w, p in spectral_decompose(np.diag([3.0, 1.0, 1.0])):
    print(f"eigenvalue {w:+.1f}  rank {p.rank}")

# %% Commutators are measured entrywise (largest modulus).
print("[sx, sy] norm:", commutator_norm(PAULI[0], PAULI[1]))

# %% Two planes in C^3 that share one line.
e = np.eye(3)
plane_1 = Projector.onto(e[:, [0, 1]])
plane_2 = Projector.onto(np.column_stack([e[:, 0], (e[:, 1] + e[:, 2]) / np.sqrt(2)]))
print("rank of the intersection:", meet(plane_1, plane_2).rank)

# %% Distinct rank-one projectors never intersect, so the conjunction has probability zero.
up_z, up_x = spin_projector([0, 0, 1]), spin_projector([1, 0, 0])
a = make_state([1, 0])
print("orthodox P(z up and x up):", ql_sequence_probability(a, up_z, up_x))
print("strict meet defined?", meet_strict(up_z, up_x).defined,
      "commutator", meet_strict(up_z, up_x).undefined.commutator)

# %% Summing the meet over an intermediate basis recovers P_ac only when c is in that basis.
x_basis = [spin_projector([1, 0, 0], s) for s in (1, -1)]
for name, pc in [("c = x up", up_x), ("c = z up", up_z)]:
    r = ql_chain_sum_check(a, x_basis, pc)
    print(f"{name}: sum_b = {r.lhs:.3f}, P_ac = {r.rhs:.3f}, delta = {r.delta:.3f}")
