"""Recording a measurement chain in pointers and comparing with the projector rule."""

# %%
from measbench import MeasurementChain, PointerModel, demon_sweep, make_state
from measbench.demon import demon_compare, system_marginal
from measbench.spin import PAULI, spin_projector

chain = MeasurementChain(make_state([1, 0]),
                         [(spin_projector([1, 0, 0]), 0.5), (spin_projector([0, 0, 1]), 1.0)],
                         0.5 * PAULI[0])

# %% One three-level pointer per step. At g * tau = 1 each pointer moves by exactly one site.
for g, tv in demon_sweep(chain, [0.125 * k for k in range(1, 9)]):
    print(f"g tau = {g:5.3f}   total variation = {tv:.2e}")

# %% Joint readout at ideal coupling, next to the projector chain.
# Label 1 means the projector fired and 0 its complement; the spare pointer level 2 stays empty.
r = demon_compare(chain, PointerModel())
for seq, w, f in zip(r.sequences, r.wigner, r.full_model):
    if w > 0 or f > 0:
        print(seq, f"chain {w:.4f}  pointers {f:.4f}")

# %% The recorded system loses its coherence in the measured basis.
print(system_marginal(chain, PointerModel()).round(4))
