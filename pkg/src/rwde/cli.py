"""Command-line experiment runner.

Usage:
    rwde list [--format json]
    rwde <experiment> [--config FILE] [--key value ...] --seed S --out DIR

Parameters come from the experiment defaults, overridden by the config file
(flat ``key=value`` lines), overridden by command-line flags.  Every run
writes its CSV artifacts and a JSON verdict into the output directory and
exits 0 exactly when all checks pass.  ``--threads`` (or the RWDE_THREADS
environment variable) sets the replica parallelism; results do not depend on
it because replicas are indexed by absolute stream number.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import UsageError
from .experiments import DEFAULT_SEED, REGISTRY, list_experiments, run_experiment


def _parse_config_file(path: str) -> dict:
    values = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line without '=': {raw!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rwde",
        description="Seeded verification experiments for walks in Dirichlet "
                    "environments.")
    sub = parser.add_subparsers(dest="command", required=True)
    lister = sub.add_parser("list", help="list registered experiments")
    lister.add_argument("--format", choices=("text", "json"), default="text")
    for spec in REGISTRY.values():
        p = sub.add_parser(spec.name, help=spec.description)
        for key, default in spec.defaults.items():
            flag = "--" + key.replace("_", "-")
            if isinstance(default, tuple):
                p.add_argument(flag, type=str, default=None,
                               help=f"default: {','.join(map(str, default))}")
            else:
                p.add_argument(flag, type=str, default=None,
                               help=f"default: {default}")
        p.add_argument("--config", type=str, default=None,
                       help="flat key=value parameter file (flags win)")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--out", type=str, default=None,
                       help="directory for CSV artifacts and the JSON verdict")
        p.add_argument("--format", choices=("text", "json"), default="text",
                       help="stdout format for the verdict")
        p.add_argument("--threads", type=int, default=None,
                       help="replica parallelism (default: RWDE_THREADS or cores)")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.command == "list":
        entries = list_experiments()
        if args.format == "json":
            print(json.dumps(entries, indent=2))
        else:
            for e in entries:
                print(f"{e['name']:22s} {e['description']}")
                print(f"{'':22s} source: {e['source']}")
        return 0

    spec = REGISTRY[args.command]
    overrides: dict = {}
    if args.config:
        overrides.update(_parse_config_file(args.config))
    for key in spec.defaults:
        value = getattr(args, key.replace("-", "_"))
        if value is not None:
            overrides[key] = value
    if args.threads is not None:
        overrides["threads"] = args.threads

    try:
        verdict = run_experiment(args.command, overrides, seed=args.seed)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        for fname, content in verdict.artifacts.items():
            (out_dir / fname).write_text(content)
        (out_dir / f"{verdict.experiment}_verdict.json").write_text(
            json.dumps(verdict.as_dict(), indent=2) + "\n")

    if args.format == "json":
        print(json.dumps(verdict.as_dict(), indent=2))
    else:
        status = "PASS" if verdict.passed else "FAIL"
        print(f"[{status}] {verdict.experiment} "
              f"(seed {verdict.seed}, {verdict.seconds:.1f} s)")
        for c in verdict.checks:
            mark = "ok " if c.passed else "BAD"
            print(f"  {mark} {c.name}: measured {c.measured:.6g} vs "
                  f"{c.expected:.6g} [{c.provenance}] ({c.tolerance})")
    return 0 if verdict.passed else 1


if __name__ == "__main__":
    sys.exit(main())
