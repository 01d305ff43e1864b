"""Running named scenarios from Python. The same runs are available as `measbench run`."""

# %%
import tempfile
from pathlib import Path

from measbench import ScenarioConfig, list_scenarios, run_scenario, validate_config

for name, module, description in list_scenarios():
    print(f"{name:18s} {module:16s} {description}")

# %% Dry run: parameters are resolved and checked without computing anything.
v = validate_config(ScenarioConfig("spin-sphere", {"n_samples": -3}))
print([f"{d.severity}: {d.message}" for d in v.diagnostics])

# %% A real run writes one CSV per quantity plus a manifest with digests.
out = Path(tempfile.mkdtemp()) / "demon"
m = run_scenario(ScenarioConfig("demon-sweep", out_dir=str(out)))
print(m.status, [f["name"] for f in m.files])
print((out / "sweep.csv").read_text())
