"""Command line: ``measbench list | validate | run``.

Exit status: 0 success, 3 ran but inconclusive, 1 error (nothing written
when the configuration is rejected).
"""

from __future__ import annotations

import argparse
import sys

from .scenarios import (
    EXIT_ERROR,
    EXIT_INCONCLUSIVE,
    EXIT_OK,
    OUT_ENV,
    ConfigError,
    ScenarioConfig,
    list_scenarios,
    parse_param,
    run_scenario,
    validate_config,
)


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="measbench",
        description="Run named measurement-sequence scenarios and write CSV tables.",
        epilog=f"Default output directory: ${OUT_ENV}/<scenario>, else ./measbench-out/<scenario>.",
    )
    sub = ap.add_subparsers(dest="verb", required=True)
    sub.add_parser("list", help="list registered scenarios")
    for verb, text in (("validate", "resolve parameters without running"),
                       ("run", "run a scenario and write its tables")):
        p = sub.add_parser(verb, help=text)
        p.add_argument("--scenario", help="scenario name (overrides the config file)")
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=int, help="master seed (seeded scenarios)")
        p.add_argument("--out", help="output directory")
        p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                       help="parameter override, value parsed as JSON (repeatable)")
        p.add_argument("--quiet", action="store_true")
        if verb == "run":
            p.add_argument("--workers", type=int, default=1,
                           help="worker threads (output does not depend on this)")
    return ap


def _config(args) -> ScenarioConfig:
    overrides = dict(parse_param(t) for t in args.param)
    if args.config:
        return ScenarioConfig.from_file(args.config, scenario=args.scenario, seed=args.seed,
                                        out_dir=args.out, params=overrides)
    if not args.scenario:
        raise ValueError("--scenario or --config is required")
    return ScenarioConfig(args.scenario, overrides, args.seed, args.out)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    say = (lambda *a: None) if getattr(args, "quiet", False) else print
    if args.verb == "list":
        for name, module, desc in list_scenarios():
            print(f"{name:18s} {module:16s} {desc}")
        return EXIT_OK
    try:
        cfg = _config(args)
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    if args.verb == "validate":
        v = validate_config(cfg)
        for d in v.diagnostics:
            print(f"{d.severity}: {d.message}", file=sys.stdout if v.ok else sys.stderr)
        if v.ok:
            say(f"scenario: {v.scenario}")
            say(f"seed: {v.seed}")
            for k in sorted(v.params):
                say(f"  {k} = {v.params[k]!r}")
        return EXIT_OK if v.ok else EXIT_ERROR
    try:
        m = run_scenario(cfg, workers=args.workers)
    except ConfigError as e:
        for d in e.diagnostics:
            if d.severity == "error":
                print(f"error: {d.message}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    say(f"{m.scenario}: {m.status}; wrote {len(m.files)} table(s) to {m.out_dir}")
    for f in m.files:
        say(f"  {f['name']}  sha256={f['sha256']}")
    return EXIT_INCONCLUSIVE if m.status == "inconclusive" else EXIT_OK
