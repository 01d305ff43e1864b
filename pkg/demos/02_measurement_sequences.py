"""Sequences of ideal measurements and where classical chaining breaks."""

# %%
import numpy as np

from measbench import MeasurementChain, feynman_discrepancy, make_state, markov_violation_report, wigner_chain
from measbench.spin import PAULI, spin_projector

sx, sz = PAULI[0], PAULI[2]
z = [spin_projector([0, 0, 1], s) for s in (1, -1)]
x = [spin_projector([1, 0, 0], s) for s in (1, -1)]

# %% Spin up along z, an unread x measurement in between, then z again.
gap = feynman_discrepancy(z, x, z)
print("direct P(up -> up):  ", gap.p_direct[0, 0])
print("chained through x:   ", gap.p_markov[0, 0])
print("largest gap:         ", gap.max_abs_gap)

# %% The same chain, measured: the nested projector product gives the chained value.
chain = MeasurementChain(make_state([1, 0]), [x[0], z[0]])
print("P(x up, then z up):", wigner_chain(chain))

# %% Repeated sigma_z observation under precession about x.
omega = 1.0
for times in [(0.0, 1.3, 2.9), (0.0, np.pi / 2, np.pi)]:
    rep = markov_violation_report(sz, 0.5 * omega * sx, make_state([1, 0]), times)
    print(f"times {np.round(times, 3)}: max defect {rep.max_defect:.4f}")

# %% No defect when the observable commutes with the Hamiltonian.
rep = markov_violation_report(sz, 0.5 * sz, make_state([0.6, 0.8]), (0.0, 1.0, 2.0))
print("commuting case:", rep.max_defect)
