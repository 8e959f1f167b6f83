"""``hermwave`` command line: run configs, list scenarios, run the acceptance suite."""

from __future__ import annotations

import argparse
import logging
import subprocess
import sys
from pathlib import Path

from .runner import ConfigError, parse_config, run
from .scenarios import CATALOG


def _find_acceptance(explicit: str | None) -> Path | None:
    if explicit:
        return Path(explicit)
    candidates = [Path.cwd() / "tests" / "test_acceptance.py",
                  Path(__file__).resolve().parents[2] / "tests" / "test_acceptance.py"]
    return next((c for c in candidates if c.is_file()), None)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="hermwave", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario config file")
    p_run.add_argument("config")
    p_run.add_argument("--out", help="output directory (overrides out_dir)")
    p_run.add_argument("--threads", type=int, help="worker threads for independent N values")
    p_run.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config key, e.g. basis.center=[10,10]; repeatable")

    sub.add_parser("list-scenarios", help="list built-in scenarios")

    p_ver = sub.add_parser("verify", help="run the acceptance suite with pytest")
    p_ver.add_argument("--tests", help="path to test_acceptance.py")
    p_ver.add_argument("pytest_args", nargs="*", help="extra pytest arguments")

    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    if args.command == "list-scenarios":
        for sc in CATALOG.values():
            print(f"{sc.id:8s} {sc.dims}D  {sc.kind:11s} {sc.description}")
        return 0

    if args.command == "verify":
        path = _find_acceptance(args.tests)
        if path is None:
            print("hermwave verify: tests/test_acceptance.py not found; pass --tests PATH", file=sys.stderr)
            return 2
        return subprocess.call([sys.executable, "-m", "pytest", "-s", "-v", str(path), *args.pytest_args])

    overrides = list(args.override)
    if args.out:
        overrides.append(f"out_dir={args.out}")
    if args.threads:
        overrides.append(f"threads={args.threads}")
    try:
        cfg = parse_config(args.config, overrides)
    except (ConfigError, OSError) as exc:
        print(f"hermwave: {exc}", file=sys.stderr)
        return 2
    result = run(cfg)
    if isinstance(result, list):
        for r in result:
            h1 = f"  H1 {r.h1_error:.3e}" if r.h1_error is not None else ""
            print(f"N={r.N:4d}  L2 {r.l2_error:.3e}  Linf {r.linf_error:.3e}{h1}")
    print(f"outputs written to {cfg.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
