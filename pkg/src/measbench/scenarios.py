"""Named, reproducible experiment scenarios with table outputs.

A scenario resolves its parameters (defaults, then config file, then
command-line overrides), validates them before computing anything, and
writes one comma-separated table per quantity plus a ``manifest.json`` with
SHA-256 digests. Floats are printed with 17 significant digits and nothing
time-dependent is recorded, so identical inputs give byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from ._version import __version__
from .demon import DEFAULT_DIM_CAP, PointerModel, demon_compare, demon_sweep
from .ensembles import (
    commuting_projector_pair,
    random_density,
    random_mask,
    random_projector,
    random_state,
    random_unitary,
)
from .hilbert import projector_from_state, make_state
from .lattice import Lattice1D, build_hamiltonian, gaussian_packet, oscillator_spectrum
from .logic import meet, ql_chain_sum_check
from .paths import (
    TimeGrid,
    distance_distribution,
    expected_path,
    joint_region_projector,
    path_distance_operator,
)
from .sequences import (
    MeasurementChain,
    born_probability,
    feynman_discrepancy,
    markov_violation_report,
    reduce_state,
    wigner_chain,
)
from .slits import (
    SlitSetup,
    coarse_grain,
    double_slit_inference,
    screen_distribution,
    slit_amplitudes,
)
from .spin import (
    PAULI,
    SphereModelConfig,
    direction_grid,
    joint_value_infeasibility,
    normalized,
    spin_projector,
    sphere_vs_quantum,
    triplewise_independent,
)

MAX_DIM = 512
OUT_ENV = "MEASBENCH_OUT"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 3


class ConfigError(ValueError):
    """Configuration rejected before any computation."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(d.message for d in self.diagnostics if d.severity == "error"))


@dataclass(frozen=True)
class Diagnostic:
    severity: str        # "error" | "warning" | "info"
    message: str


@dataclass(frozen=True)
class Table:
    name: str
    quantity: str
    columns: tuple
    rows: list


@dataclass(frozen=True)
class Outcome:
    tables: list
    status: str = "ok"


@dataclass(frozen=True)
class Scenario:
    name: str
    module: str
    description: str
    defaults: dict
    run: Callable
    check: Callable
    seeded: bool = False


@dataclass
class ScenarioConfig:
    scenario: str
    params: dict = field(default_factory=dict)
    seed: int | None = None
    out_dir: str | None = None

    @classmethod
    def from_file(cls, path, **overrides) -> "ScenarioConfig":
        """Load a JSON config: ``{"scenario", "params", "seed", "out"}``."""
        data = json.loads(Path(path).read_text())
        if not isinstance(data, dict):
            raise ValueError("config file must hold a JSON object")
        cfg = cls(data.get("scenario", ""), dict(data.get("params", {})),
                  data.get("seed"), data.get("out"))
        for k, v in overrides.items():
            if v is None:
                continue
            if k == "params":
                cfg.params.update(v)
            else:
                setattr(cfg, k, v)
        return cfg


@dataclass(frozen=True)
class RunManifest:
    scenario: str
    params: dict
    seed: int | None
    version: str
    status: str
    files: list          # [{"name", "sha256"}]
    out_dir: str

    def to_json(self) -> str:
        body = {
            "scenario": self.scenario,
            "params": self.params,
            "seed": self.seed,
            "version": self.version,
            "status": self.status,
            "files": self.files,
        }
        return json.dumps(body, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------- helpers

def _err(msg):
    return Diagnostic("error", msg)


def _positive(p, *keys):
    return [_err(f"{k} must be positive (got {p[k]!r})") for k in keys if not p[k] > 0]


def _dim_cap(p, key, cap=MAX_DIM):
    if p[key] > cap:
        return [_err(f"{key} = {p[key]} exceeds the dense-dimension cap {cap}")]
    return []


def _ascending(p, key, strict=True):
    t = p[key]
    bad = any((b <= a) if strict else (b < a) for a, b in zip(t, t[1:]))
    return [_err(f"{key} must be {'strictly ' if strict else ''}increasing")] if bad else []


def _spin_hamiltonian(omega):
    return None if omega == 0 else 0.5 * omega * PAULI[0]


def _axis(theta):
    return np.array([math.sin(theta), 0.0, math.cos(theta)])


# -------------------------------------------------------------- scenarios

def _feynman_gap(p, seed, workers=1):
    z = [spin_projector([0, 0, 1], s) for s in (1, -1)]
    b = [spin_projector(_axis(p["theta_b"]), s) for s in (1, -1)]
    gap = feynman_discrepancy(z, b, z, hamiltonian=_spin_hamiltonian(p["omega"]),
                              times=p["times"])
    labels = ("up", "down")
    rows = [(labels[i], labels[j], gap.p_direct[i, j], gap.p_markov[i, j],
             gap.p_direct[i, j] - gap.p_markov[i, j])
            for i in range(2) for j in range(2)]
    return Outcome([Table("gap.csv", "direct two-time probability vs classical chaining "
                          "through an unobserved intermediate basis",
                          ("a", "c", "p_direct", "p_markov", "difference"), rows)])


def _feynman_check(p):
    return _ascending(p, "times", strict=False) + (
        [_err("times must have three entries")] if len(p["times"]) != 3 else [])


def _ql_meet(p, seed, workers=1):
    rng = np.random.default_rng(seed)
    rows = []
    for trial in range(p["n_pairs"]):
        n = int(rng.integers(p["dim_min"], p["dim_max"] + 1))
        a, b = random_projector(rng, n, 1), random_projector(rng, n, 1)
        rows.append((trial, "distinct_rank_one", n, float(np.max(np.abs(meet(a, b).matrix)))))
    for trial in range(p["n_pairs"]):
        n = int(rng.integers(p["dim_min"], p["dim_max"] + 1))
        P, Q = commuting_projector_pair(rng, n)
        err = float(np.max(np.abs(meet(P, Q).matrix - P.matrix @ Q.matrix)))
        rows.append((trial, "commuting", n, err))
    chain = []
    for trial in range(p["n_chain"]):
        n = int(rng.integers(p["dim_min"], p["dim_max"] + 1))
        u = random_unitary(rng, n)
        basis = [projector_from_state(u[:, k]) for k in range(n)]
        a = random_state(rng, n)
        for case, pc in (("member", basis[int(rng.integers(n))]),
                         ("outside", random_projector(rng, n, 1)),
                         ("identity", np.eye(n))):
            r = ql_chain_sum_check(a, basis, pc)
            chain.append((trial, n, case, r.lhs, r.rhs, r.delta))
    return Outcome([
        Table("meet.csv", "subspace-intersection meet error (distinct rank one: |meet|; "
              "commuting: |meet - PQ|)", ("trial", "family", "dim", "max_abs_error"), rows),
        Table("chain_sum.csv", "sum over a basis of meet probabilities vs direct probability",
              ("trial", "dim", "case", "lhs", "rhs", "delta"), chain),
    ])


def _ql_check(p):
    d = _positive(p, "n_pairs", "n_chain") + _dim_cap(p, "dim_max")
    if not 2 <= p["dim_min"] <= p["dim_max"]:
        d.append(_err("need 2 <= dim_min <= dim_max"))
    return d


def _wigner_two_step(p, seed, workers=1):
    rng = np.random.default_rng(seed)
    rows = []
    n = p["dim"]
    for trial in range(p["n_triples"]):
        rho = random_density(rng, n)
        pb = random_projector(rng, n, int(rng.integers(1, n)))
        pc = random_projector(rng, n, int(rng.integers(1, n)))
        w = wigner_chain(MeasurementChain(rho, [pb, pc]))
        prob_b, post = reduce_state(rho, pb)
        via = 0.0 if post is None else prob_b * born_probability(post, pc)
        rows.append((trial, w, via, abs(w - via)))
    return Outcome([Table("two_step.csv", "two-step projector chain vs single Born "
                          "probability in the reduced state",
                          ("trial", "chain", "reduced_born", "abs_diff"), rows)])


def _wigner_check(p):
    return _positive(p, "n_triples") + _dim_cap(p, "dim") + (
        [_err("dim must be at least 2")] if p["dim"] < 2 else [])


def _demon_chain(p, commuting=False):
    up = make_state([1, 0])
    if commuting:
        h = 0.5 * p["omega"] * PAULI[2]
        steps = [(spin_projector([0, 0, 1]), p["times"][0]),
                 (spin_projector([0, 0, -1]), p["times"][1])]
    else:
        h = _spin_hamiltonian(p["omega"])
        steps = [(spin_projector(_axis(p["theta_1"])), p["times"][0]),
                 (spin_projector(_axis(p["theta_2"])), p["times"][1])]
    return MeasurementChain(up, steps, h)


def _demon_sweep(p, seed, workers=1):
    chain, control = _demon_chain(p), _demon_chain(p, commuting=True)
    base = PointerModel(p["pointer_dim"], 1.0, p["duration"])
    gs = [float(g) for g in p["couplings"]]
    tv = demon_sweep(chain, gs, base, p["dim_cap"], workers)
    tv_ctrl = demon_sweep(control, gs, base, p["dim_cap"], workers)
    rows = [(g, g * p["duration"], d) for g, d in tv]
    ctrl = [(g, g * p["duration"], d) for g, d in tv_ctrl]
    last = demon_compare(chain, PointerModel(p["pointer_dim"], gs[-1], p["duration"]),
                         p["dim_cap"])
    seq = [("".join(map(str, s)), w, f)
           for s, w, f in zip(last.sequences, last.wigner, last.full_model)]
    return Outcome([
        Table("sweep.csv", "total variation between pointer-recorded statistics and "
              "the projector chain", ("coupling", "g_tau", "total_variation"), rows),
        Table("control.csv", "same, for a commuting chain", ("coupling", "g_tau",
              "total_variation"), ctrl),
        Table("sequences.csv", "joint readout distribution at the last coupling",
              ("readout", "chain", "full_model"), seq),
    ])


def _demon_check(p):
    d = []
    if len(p["times"]) != 2:
        d.append(_err("times must have two entries"))
    else:
        d += _ascending(p, "times", strict=False)
    if not p["couplings"]:
        d.append(_err("couplings must be nonempty"))
    if any(g < 0 for g in p["couplings"]):
        d.append(_err("couplings must be nonnegative"))
    m = 3 if p["pointer_dim"] is None else p["pointer_dim"]
    if m < 2:
        d.append(_err("pointer_dim must be at least 2"))
    need = 2 * m ** 2
    if need > p["dim_cap"]:
        d.append(_err(f"composite dimension {need} exceeds dim_cap {p['dim_cap']}"))
    if p["dim_cap"] > DEFAULT_DIM_CAP:
        d.append(_err(f"dim_cap {p['dim_cap']} exceeds the hard cap {DEFAULT_DIM_CAP}"))
    return d


def _markov_memory(p, seed, workers=1):
    h = _spin_hamiltonian(p["omega"])
    if h is None:
        h = np.zeros((2, 2))
    rep = markov_violation_report(PAULI[2], h, make_state([1, 0]), p["times"])
    labels = ("down", "up")      # ascending eigenvalues of sigma_z
    rows = []
    for name, od in (("increasing", rep.increasing), ("decreasing", rep.decreasing)):
        for i in range(2):
            for j in range(2):
                rows.append((name, labels[i], labels[j], od.joint.sum(axis=1)[i, j],
                             od.direct[i, j], od.defect[i, j]))
    return Outcome([Table("defect.csv", "sum over intermediate outcomes of the reduction "
                          "chain vs the unobserved two-time probability",
                          ("ordering", "a", "c", "sum_b_chain", "direct", "defect"), rows)])


def _markov_check(p):
    d = []
    if len(p["times"]) != 3:
        d.append(_err("times must have three entries"))
    else:
        d += _ascending(p, "times")
    return d


def _spin_sphere(p, seed, workers=1):
    u = tuple(normalized(p["u"]))
    cfg = SphereModelConfig(u, p["n_samples"], seed)
    rows = [(*r.v, r.p_hat, r.p_quantum, r.std_err, r.z_score)
            for r in sphere_vs_quantum(cfg, direction_grid(p["n_directions"], u), workers)]
    max_z = max(abs(r[-1]) for r in rows)
    status = "ok" if max_z <= p["z_threshold"] else "inconclusive"
    return Outcome([Table("sphere.csv", "hidden-variable sphere frequency vs quantum "
                          "spin probability", ("vx", "vy", "vz", "p_hat", "p_quantum",
                                               "std_err", "z"), rows)], status)


def _spin_check(p):
    d = _positive(p, "n_samples", "n_directions", "z_threshold")
    if len(p["u"]) != 3 or not np.linalg.norm(p["u"]) > 0:
        d.append(_err("u must be a nonzero 3-vector"))
    return d


def _joint_value(p, seed, workers=1):
    dirs = normalized(p["directions"])
    rows = []
    for k in range(3, len(dirs) + 1):
        r = joint_value_infeasibility(dirs[:k])
        rows.append((k, r.best_residual, r.assignments_tested))
    return Outcome([Table("residuals.csv", "least-squares misfit of one vector to sharp "
                          "values along the first k directions",
                          ("n_directions", "best_residual", "assignments_tested"), rows)])


def _joint_check(p):
    d = []
    dirs = np.asarray(p["directions"], dtype=float)
    if dirs.ndim != 2 or dirs.shape[1] != 3 or len(dirs) < 3:
        return [_err("directions must be a list of at least three 3-vectors")]
    if len(dirs) > 16:
        d.append(_err("at most 16 directions (2^k enumeration)"))
    if not triplewise_independent(normalized(dirs)):
        d.append(_err("directions are not triplewise linearly independent"))
    return d


def _lattice(p):
    return Lattice1D(p["n_sites"], p["dx"])


def _path_cdf(p, seed, workers=1):
    lat = _lattice(p)
    h = build_hamiltonian(lat, mass=p["mass"])
    grid = TimeGrid(0.0, p["t_end"], p["n_times"])
    a = gaussian_packet(lat, p["x0"], p["sigma"], p["k0"])
    xi = expected_path(a, h, lat, grid)
    # the last grid point is the spectral maximum, where the CDF is 1 exactly
    top = path_distance_operator(h, lat, xi).eigvalsh()[-1]
    eps = np.linspace(0.0, p["eps_max"], p["n_eps"])
    if top > eps[-1]:
        eps = np.append(eps, top)
    cdf = distance_distribution(a, h, lat, xi, eps)
    free = p["x0"] + p["k0"] / p["mass"] * grid.times
    return Outcome([
        Table("cdf.csv", "probability that the path stays within eps of the expected path",
              ("eps", "probability"), list(zip(eps, cdf))),
        Table("path.csv", "expected Heisenberg position and free classical motion",
              ("t", "xi", "free_motion"), list(zip(grid.times, xi.samples, free))),
    ])


def _path_check(p):
    return (_positive(p, "dx", "mass", "sigma", "t_end", "n_times", "eps_max", "n_eps")
            + _dim_cap(p, "n_sites") + ([_err("n_sites must be at least 8")]
                                        if p["n_sites"] < 8 else []))


def _slit_setup(p):
    return SlitSetup(Lattice1D(p["n_sites"], p["dx"]), p["slit_a"], p["slit_b"],
                     p["slit_sigma"], p["slit_halfwidth"], source_sigma=p["source_sigma"],
                     t_screen=p["t_screen"], n_times=p["n_times"],
                     screen_width=p["screen_width"], eps=p["eps"], mass=p["mass"])


def _double_slit(p, seed, workers=1):
    setup = _slit_setup(p)
    x = setup.lattice.positions()
    both = screen_distribution(setup, "AB")
    only_a = screen_distribution(setup, "A")
    only_b = screen_distribution(setup, "B")
    pa, pb = slit_amplitudes(setup)
    oracle = coarse_grain(np.abs(pa + pb) ** 2, setup.screen_width)
    screen = [(j, x[j], both[j], only_a[j], only_b[j], oracle[j]) for j in range(len(x))]
    inf, status = [], "ok"
    for site in p["detection_sites"]:
        r = double_slit_inference(setup, site)
        inf.append((site, x[site], r.p_a, r.p_b, r.likelihood_ratio, int(r.conclusive)))
        if not r.conclusive:
            status = "inconclusive"
    return Outcome([
        Table("screen.csv", "screen detection probability with both, only A, only B "
              "open, and the two-source amplitude sum",
              ("site", "x", "p_both", "p_a_only", "p_b_only", "two_source"), screen),
        Table("inference.csv", "path-band probabilities around straight paths from each "
              "slit to the detection site", ("site", "x", "p_a", "p_b",
                                             "likelihood_ratio", "conclusive"), inf),
    ], status)


def _slit_check(p):
    d = _positive(p, "dx", "mass", "t_screen", "n_times", "screen_width", "slit_sigma",
                  "source_sigma") + _dim_cap(p, "n_sites")
    if p["eps"] < 0:
        d.append(_err("eps must be nonnegative"))
    if any(not 0 <= s < p["n_sites"] for s in p["detection_sites"]):
        d.append(_err("detection sites must lie on the lattice"))
    if not d:
        try:
            _slit_setup(p)
        except ValueError as e:
            d.append(_err(str(e)))
    return d


def _oscillator(p, seed, workers=1):
    lat = _lattice(p)
    w = oscillator_spectrum(p["a"], lat)[: p["n_levels"]]
    exact = (2 * np.arange(len(w)) + 1) * p["a"]
    rows = [(n, w[n], exact[n], abs(w[n] - exact[n]) / exact[n]) for n in range(len(w))]
    return Outcome([Table("spectrum.csv", "lowest eigenvalues of p^2 + a^2 q^2 on the "
                          "lattice vs (2n + 1) a", ("n", "eigenvalue", "analytic",
                                                    "rel_err"), rows)])


def _oscillator_check(p):
    return (_positive(p, "a", "dx", "n_levels") + _dim_cap(p, "n_sites")
            + ([_err("n_sites must be at least 8")] if p["n_sites"] < 8 else []))


def _region_degeneracy(p, seed, workers=1):
    rng = np.random.default_rng(seed)
    lat = _lattice(p)
    h = build_hamiltonian(lat)
    k = int(round(p["mask_fraction"] * lat.n_sites))
    ranks = []
    for trial in range(p["n_trials"]):
        masks = [random_mask(rng, lat.n_sites, k) for _ in p["times"]]
        ranks.append(joint_region_projector(h, lat, masks, p["times"]).dim)
    counts = np.bincount(ranks)
    return Outcome([
        Table("trials.csv", "dimension of the common region subspace per trial",
              ("trial", "rank"), list(enumerate(ranks))),
        Table("distribution.csv", "trial count per common-subspace dimension",
              ("rank", "count"), [(r, int(c)) for r, c in enumerate(counts)]),
    ])


def _region_check(p):
    d = _positive(p, "n_trials", "dx") + _dim_cap(p, "n_sites")
    if not 0 < p["mask_fraction"] <= 1:
        d.append(_err("mask_fraction must lie in (0, 1]"))
    if len(p["times"]) < 1:
        d.append(_err("times must be nonempty"))
    if p["n_sites"] < 8:
        d.append(_err("n_sites must be at least 8"))
    return d


REGISTRY: dict[str, Scenario] = {s.name: s for s in [
    Scenario("feynman-gap", "sequence-engine",
             "Direct vs Markov-chained spin probabilities through an intermediate basis",
             {"omega": 0.0, "theta_b": math.pi / 2, "times": [0.0, 1.0, 2.0]},
             _feynman_gap, _feynman_check),
    Scenario("ql-meet", "quantum-logic",
             "Subspace meet on random rank-one and commuting pairs; basis sum check",
             {"n_pairs": 1000, "dim_min": 2, "dim_max": 8, "n_chain": 50},
             _ql_meet, _ql_check, seeded=True),
    Scenario("wigner-two-step", "sequence-engine",
             "Two-step projector chain vs Born rule in the reduced state",
             {"n_triples": 500, "dim": 4}, _wigner_two_step, _wigner_check, seeded=True),
    Scenario("demon-sweep", "sequence-engine",
             "System-plus-pointer statistics vs projector chain over a coupling sweep",
             {"omega": 1.0, "theta_1": math.pi / 2, "theta_2": 0.0, "times": [0.5, 1.0],
              "couplings": [0.125 * k for k in range(1, 9)], "duration": 1.0,
              "pointer_dim": None, "dim_cap": DEFAULT_DIM_CAP},
             _demon_sweep, _demon_check),
    Scenario("markov-memory", "sequence-engine",
             "Memory and anticipation defects of repeated sigma_z observation under precession",
             {"omega": 1.0, "times": [0.0, 1.3, 2.9]}, _markov_memory, _markov_check),
    Scenario("spin-sphere", "spin-sphere",
             "Classical hidden-variable sphere model vs quantum spin probabilities",
             {"n_samples": 1_000_000, "n_directions": 32, "u": [0.0, 0.0, 1.0],
              "z_threshold": 4.0},
             _spin_sphere, _spin_check, seeded=True),
    Scenario("joint-value", "spin-sphere",
             "No single vector reproduces sharp values along four or more directions",
             {"directions": [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1], [1, -1, 2]]},
             _joint_value, _joint_check),
    Scenario("path-cdf", "path-lab",
             "Distribution of the path distance from the expected path of a free packet",
             {"n_sites": 128, "dx": 1.0, "mass": 1.0, "x0": -20.0, "sigma": 4.0, "k0": 0.5,
              "t_end": 16.0, "n_times": 16, "eps_max": 40.0, "n_eps": 81},
             _path_cdf, _path_check),
    Scenario("double-slit", "path-lab",
             "Screen fringes and after-the-fact slit likelihood ratios",
             {"n_sites": 129, "dx": 1.0, "mass": 1.0, "slit_a": 56, "slit_b": 72,
              "slit_sigma": 1.0, "slit_halfwidth": 3, "source_sigma": 30.0,
              "t_screen": 10.0, "n_times": 16, "screen_width": 1, "eps": 8.0,
              "detection_sites": [64, 56, 48, 44]},
             _double_slit, _slit_check),
    Scenario("oscillator", "path-lab",
             "Lattice spectrum of p^2 + a^2 q^2 against (2n + 1) a",
             {"a": 1.0, "n_sites": 256, "dx": 0.1, "n_levels": 10},
             _oscillator, _oscillator_check),
    Scenario("region-degeneracy", "path-lab",
             "Rank of the joint space-time region projector for random masks",
             {"n_trials": 100, "n_sites": 128, "dx": 1.0, "times": [0.0, 10.0],
              "mask_fraction": 0.5},
             _region_degeneracy, _region_check, seeded=True),
]}

DEFAULT_SEEDS = {"spin-sphere": 42}


def list_scenarios() -> list[tuple[str, str, str]]:
    """``(name, module, description)`` for every registered scenario, sorted."""
    return [(s.name, s.module, s.description) for s in sorted(REGISTRY.values(),
                                                              key=lambda s: s.name)]


# ----------------------------------------------------- resolution & checks

def parse_param(text: str) -> tuple[str, object]:
    """``key=value`` with the value parsed as JSON when possible."""
    if "=" not in text:
        raise ValueError(f"parameter override {text!r} is not key=value")
    key, raw = text.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip(), value


def _coerce(key, value, default):
    if default is None or value is None:
        return value
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise TypeError(f"{key} must be a boolean")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, (int, float)) or value != int(value):
            raise TypeError(f"{key} must be an integer")
        return int(value)
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise TypeError(f"{key} must be a number")
        return float(value)
    if isinstance(default, list):
        if not isinstance(value, list):
            raise TypeError(f"{key} must be a list")
        return value
    return value


@dataclass(frozen=True)
class Validation:
    ok: bool
    scenario: str
    params: dict
    seed: int | None
    diagnostics: list


def validate_config(config: ScenarioConfig) -> Validation:
    """Resolve and check parameters without running anything."""
    diags = []
    sc = REGISTRY.get(config.scenario)
    if sc is None:
        diags.append(_err(f"unknown scenario {config.scenario!r}; "
                          f"choose one of: {', '.join(sorted(REGISTRY))}"))
        return Validation(False, config.scenario, {}, None, diags)
    params = json.loads(json.dumps(sc.defaults))
    for key, value in config.params.items():
        if key not in sc.defaults:
            diags.append(_err(f"unknown parameter {key!r} for {sc.name}"))
            continue
        try:
            params[key] = _coerce(key, value, sc.defaults[key])
        except TypeError as e:
            diags.append(_err(str(e)))
    seed = None
    if sc.seeded:
        seed = DEFAULT_SEEDS.get(sc.name, 0) if config.seed is None else config.seed
        if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2 ** 64:
            diags.append(_err("seed must be an integer in [0, 2^64)"))
    elif config.seed is not None:
        diags.append(Diagnostic("info", f"{sc.name} is deterministic; seed ignored"))
    if not any(d.severity == "error" for d in diags):
        try:
            diags.extend(sc.check(params))
        except (TypeError, ValueError) as e:
            diags.append(_err(f"invalid parameters: {e}"))
    ok = not any(d.severity == "error" for d in diags)
    if ok:
        diags.append(Diagnostic("info", "ok"))
    return Validation(ok, sc.name, params, seed, diags)


# ------------------------------------------------------------------ output

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if v == 0:
            v = 0.0      # no negative zero
        return format(v, ".17g")
    return str(v)


def render_table(table: Table, scenario: str, params: dict, seed) -> str:
    lines = [
        f"# scenario: {scenario}",
        f"# quantity: {table.quantity}",
        f"# seed: {seed if seed is not None else 'none'}",
        f"# params: {json.dumps(params, sort_keys=True)}",
        f"# version: {__version__}",
        ",".join(table.columns),
    ]
    lines += [",".join(_fmt(v) for v in row) for row in table.rows]
    return "\n".join(lines) + "\n"


def default_out_dir(scenario: str) -> Path:
    base = os.environ.get(OUT_ENV, "measbench-out")
    return Path(base) / scenario


def run_scenario(config: ScenarioConfig, workers: int = 1) -> RunManifest:
    """Validate, compute, and write the scenario's tables and manifest.

    Raises :class:`ConfigError` (nothing written) when validation fails.
    ``workers`` only changes how the work is scheduled, never the output.
    """
    v = validate_config(config)
    if not v.ok:
        raise ConfigError(v.diagnostics)
    sc = REGISTRY[v.scenario]
    outcome = sc.run(v.params, v.seed, workers)
    out = Path(config.out_dir) if config.out_dir else default_out_dir(sc.name)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for t in outcome.tables:
        if Path(t.name).name != t.name:
            raise ValueError(f"table name {t.name!r} would escape the output directory")
        text = render_table(t, sc.name, v.params, v.seed).encode()
        (out / t.name).write_bytes(text)
        files.append({"name": t.name, "sha256": hashlib.sha256(text).hexdigest()})
    manifest = RunManifest(sc.name, v.params, v.seed, __version__, outcome.status, files,
                           str(out))
    (out / "manifest.json").write_text(manifest.to_json())
    return manifest


def verify_manifest(out_dir) -> bool:
    """Recompute digests of the files listed in ``out_dir/manifest.json``."""
    out = Path(out_dir)
    m = json.loads((out / "manifest.json").read_text())
    return all(hashlib.sha256((out / f["name"]).read_bytes()).hexdigest() == f["sha256"]
               for f in m["files"])
