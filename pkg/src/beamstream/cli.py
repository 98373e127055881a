"""Command line entry point: ``beamstream {validate,run,compare,regret,presets}``.

Every flag can also be set through an environment variable named
``BEAMSTREAM_<FLAG>`` (e.g. ``BEAMSTREAM_SEEDS=5``); explicit flags win.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
import yaml

from . import config as cfgmod
from .config import ExperimentConfig, validate
from .engine import run_experiment
from .export import AGGREGATE_FILES, write_aggregates, write_regret_report, write_trace
from .regret import HarnessInstance, StationaryArmSet, default_instances, regret_report
from .schedulers import SCHEDULERS

ENV_PREFIX = "BEAMSTREAM_"

EXIT_OK, EXIT_IO, EXIT_CONFIG, EXIT_BOUND = 0, 1, 2, 3


def _env(name: str, default=None):
    return os.environ.get(ENV_PREFIX + name.upper(), default)


def parse_seeds(text) -> List[int]:
    """``"10"`` means seeds 0..9; ``"3,7,11"`` is an explicit list."""
    if text is None:
        return []
    text = str(text).strip()
    if not text:
        return []
    if "," in text:
        return [int(s) for s in text.split(",") if s.strip()]
    return list(range(int(text)))


def _source_args(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--config", default=_env("config"), help="YAML experiment config")
    g.add_argument("--preset", default=_env("preset"), help="named preset (see `presets`)")


def _run_args(p: argparse.ArgumentParser, default_sched: str) -> None:
    _source_args(p)
    p.add_argument("--scheduler", "--schedulers", dest="scheduler",
                   default=_env("scheduler", default_sched), help="comma-separated scheduler names")
    p.add_argument("--seeds", default=_env("seeds"), help="N (seeds 0..N-1) or a comma list")
    p.add_argument("--out", default=_env("out", "out"), help="output directory")
    p.add_argument("--force", action="store_true", default=bool(_env("force")), help="overwrite existing files")
    p.add_argument("--parallel", type=int, default=int(_env("parallel", 1)), help="max parallel episodes")
    p.add_argument("--format", choices=("csv", "json"), default=_env("format", "csv"), help="trace file format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="beamstream", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a config and print its capacity feasibility")
    _source_args(p)

    _run_args(sub.add_parser("run", help="simulate one or more schedulers"), "b2p")
    _run_args(sub.add_parser("compare", help="simulate several schedulers into merged aggregates"),
              "b2p,uniform,rr")

    p = sub.add_parser("regret", help="stationary-bandit regret versus the closed-form bound")
    p.add_argument("--config", default=_env("config"), help="YAML harness config (instances, checkpoints)")
    p.add_argument("--seeds", default=_env("seeds", "20"), help="N (seeds 0..N-1) or a comma list")
    p.add_argument("--out", default=_env("out", "out"), help="output directory")
    p.add_argument("--force", action="store_true", default=bool(_env("force")))
    p.add_argument("--modes", default="sample-mean,decay")

    p = sub.add_parser("presets", help="list presets or dump one as YAML")
    p.add_argument("name", nargs="?")
    return parser


def _load_configs(args) -> List[ExperimentConfig]:
    if args.config:
        return [cfgmod.load(args.config)]
    return cfgmod.preset(args.preset or "table1")


def _prepare_out(out: Path, names: List[str], force: bool) -> Optional[str]:
    out.mkdir(parents=True, exist_ok=True)
    clash = [n for n in names if (out / n).exists()]
    if clash and not force:
        return f"refusing to overwrite {len(clash)} file(s) in {out} (e.g. {clash[0]}); pass --force"
    return None


def cmd_validate(args) -> int:
    try:
        configs = _load_configs(args)
    except (ValueError, TypeError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    status = EXIT_OK
    for c in configs:
        violations = validate(c)
        if violations:
            status = EXIT_CONFIG
            for v in violations:
                print(f"violation: {v}")
            continue
        rep = cfgmod.feasibility_report(c)
        print(f"ok N={c.n_users} K={c.k_rf}: demand {rep['demand_mbps']:.1f} Mbps, "
              f"capacity {rep['capacity_mbps']:.1f} Mbps, feasible={rep['feasible']}")
    return status


def cmd_run(args) -> int:
    try:
        configs = _load_configs(args)
    except (ValueError, TypeError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.seeds is not None:
        seeds = parse_seeds(args.seeds)
        configs = [c.replace(seeds=tuple(seeds)) for c in configs]
    schedulers = [s.strip() for s in args.scheduler.split(",") if s.strip()]
    bad = [s for s in schedulers if s not in SCHEDULERS]
    violations = [str(v) for c in configs for v in validate(c)]
    if bad:
        violations.append(f"scheduler: unknown {bad}; choose from {sorted(SCHEDULERS)}")
    if violations:
        for v in violations:
            print(f"violation: {v}")
        return EXIT_CONFIG

    out = Path(args.out)
    try:
        names = list(AGGREGATE_FILES)
        for c in configs:
            for s in schedulers:
                for seed in c.seeds:
                    names.append(f"trace_{s}_N{c.n_users}_K{c.k_rf}_seed{seed}.{args.format}")
        msg = _prepare_out(out, names, args.force)
        if msg:
            print(msg, file=sys.stderr)
            return EXIT_IO
        groups = []
        for c in configs:
            for s in schedulers:
                traces = run_experiment(c, s, parallel=args.parallel)
                for tr in traces:
                    write_trace(tr, out, args.format)
                groups.append(traces)
                zh = np.mean([tr.zero_hit.mean() for tr in traces])
                q = np.mean([tr.qoe.mean() for tr in traces])
                print(f"{s} N={c.n_users} K={c.k_rf}: zero-hit fraction {zh:.4f}, mean QoE {q:.4f}")
        write_aggregates(groups, out)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _harness_from_yaml(path) -> tuple:
    doc = yaml.safe_load(Path(path).read_text()) or {}
    instances = []
    for d in doc.get("instances", []):
        arms = StationaryArmSet(tuple(d["means"]), tuple(d["trend"]) if d.get("trend") else None,
                                d.get("noise", "bernoulli"), d.get("name", ""))
        instances.append(HarnessInstance(arms, float(d.get("lipschitz", 0.0)),
                                         float(d.get("b_max", 60.0)), int(d.get("k", 1))))
    checkpoints = tuple(int(x) for x in doc.get("checkpoints", (100, 1000, 10000)))
    return instances, checkpoints


def cmd_regret(args) -> int:
    seeds = parse_seeds(args.seeds)
    if not seeds:
        print("violation: seeds: must be non-empty")
        return EXIT_CONFIG
    try:
        if args.config:
            instances, checkpoints = _harness_from_yaml(args.config)
        else:
            instances, checkpoints = default_instances(), (100, 1000, 10000)
    except (ValueError, TypeError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out)
    modes = tuple(m.strip() for m in args.modes.split(",") if m.strip())
    try:
        msg = _prepare_out(out, ["regret_report.csv"], args.force)
        if msg:
            print(msg, file=sys.stderr)
            return EXIT_IO
        report = regret_report(instances, seeds, checkpoints, modes=modes)
        write_regret_report(report, out / "regret_report.csv")
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    for note in report.notes:
        print(f"note: {note}")
    checked = [r for r in report.means("sample-mean") if r.bound is not None]
    if not report.bound_held:
        print("bound violated in sample-mean mode")
        return EXIT_BOUND
    if checked:
        print("bound held")
    else:
        print("bound vacuous")
    return EXIT_OK


def cmd_presets(args) -> int:
    if args.name:
        try:
            configs = cfgmod.preset(args.name)
        except KeyError as exc:
            print(exc.args[0], file=sys.stderr)
            return EXIT_CONFIG
        print("---\n".join(cfgmod.dumps(c) for c in configs), end="")
        return EXIT_OK
    for name, configs in cfgmod.PRESETS.items():
        ns = ",".join(str(c.n_users) for c in configs)
        print(f"{name}: N={ns} K={configs[0].k_rf} T={configs[0].horizon}")
    return EXIT_OK


COMMANDS = {"validate": cmd_validate, "run": cmd_run, "compare": cmd_run,
            "regret": cmd_regret, "presets": cmd_presets}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
