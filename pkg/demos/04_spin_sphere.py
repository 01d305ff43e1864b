"""A classical random-vector model for one spin, and why it cannot hold sharp values."""

# %%
import numpy as np

from measbench import SphereModelConfig, joint_value_infeasibility, sphere_vs_quantum
from measbench.spin import direction_grid, normalized

# %% Hidden vector drawn with density max(0, u . lam) / pi. Each direction answers sign(v . lam).
cfg = SphereModelConfig((0.0, 0.0, 1.0), n_samples=200_000, seed=42)
rows = sphere_vs_quantum(cfg, direction_grid(9))
for r in rows:
    print(f"v.u = {r.v[2]:+.3f}   sphere {r.p_hat:.4f}   quantum {r.p_quantum:.4f}   z {r.z_score:+.2f}")

# %% Same seed, same numbers, however the work is split.
again = sphere_vs_quantum(cfg, direction_grid(9), workers=4)
print("identical on rerun:", again == rows)

# %% Three orthogonal directions admit a vector with sharp values +-1. A fourth does not.
dirs = [[1, 0, 0], [0, 1, 0], [0, 0, 1], normalized([1, 1, 1]), normalized([1, -1, 2])]
for k in range(3, 6):
    r = joint_value_infeasibility(np.array(dirs[:k]))
    print(f"{k} directions: best residual {r.best_residual:.4f} over {r.assignments_tested} sign patterns")
