"""Command line entry point: ``primecf --experiment freq --n 100000``."""

from __future__ import annotations

import argparse
import sys

from .errors import DomainError
from .experiments import REGISTRY, ExperimentConfig, load_config, run_experiment, to_csv, to_json, write_report
from .experiments.config import KEYS, convert_value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="primecf", description="Run prime-digit continued fraction experiments.")
    p.add_argument("--config", help="key = value file; command line flags override it")
    p.add_argument("--list", action="store_true", help="list experiments and exit")
    for key in KEYS:
        p.add_argument("--" + key.replace("_", "-"), dest=key, default=None, metavar=key.upper())
    return p


def _list() -> str:
    width = max(len(name) for name in REGISTRY)
    return "\n".join(f"{name:<{width}}  {exp.anchor}" for name, exp in REGISTRY.items())


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.list:
        print(_list())
        return 0
    try:
        values = load_config(args.config) if args.config else {}
        for key in KEYS:
            raw = getattr(args, key)
            if raw is not None:
                values[key] = convert_value(key, raw)
        if "experiment" not in values:
            raise DomainError("no experiment given; use --experiment NAME (see --list)")
        report = run_experiment(ExperimentConfig(**values))
        fmt = values.get("format", "csv")
        if values.get("out"):
            write_report(report, values["out"], fmt)
        else:
            sys.stdout.write(to_csv(report) if fmt == "csv" else to_json(report))
    except (DomainError, OSError) as exc:
        print(f"primecf: error: {exc}", file=sys.stderr)
        return 2
    print(f"wall clock {report.wall_clock:.2f} s", file=sys.stderr)
    return 1 if report.failed else 0


if __name__ == "__main__":
    sys.exit(main())
