"""Command line: ``dephasing {run,sweep,validate,limits}``.

Exit codes: 0 success, 1 validation failed, 2 config or usage error,
3 numerical non-convergence, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness
from .config import ConfigError, build, env_overrides, load
from .numerics import QuadratureError, SeriesTruncationError

EXIT_OK, EXIT_VALIDATE, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3, 4

# validation defaults when no config file is given: lambda = Omega = 1, Omega*beta = 10
_VALIDATE_DEFAULTS = {"bath.lambda": "1", "bath.omega_c": "1", "bath.omega_beta": "10"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="scenario file (flat section.key = value)")
    common.add_argument("--out", type=Path, default=Path("out"), help="output directory (default: ./out)")
    common.add_argument("--workers", type=int, default=1, help="process count for sweeps and validation")
    common.add_argument("--tol-profile", choices=("fast", "strict"), help="quadrature tolerance preset")

    p = _Parser(prog="dephasing", description="Qubit pure-dephasing calculations.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("run", parents=[common], help="time series CSV plus JSON summary")
    sw = sub.add_parser("sweep", parents=[common], help="one run per parameter value")
    sw.add_argument("--param", choices=("lambda", "s", "beta"))
    sw.add_argument("--values", help="comma-separated values (overrides sweep.values)")
    sub.add_parser("validate", parents=[common], help="closed vs quadrature vs discrete checks")
    sub.add_parser("limits", parents=[common], help="print long-time limits and bounds")
    return p


def _load(args, defaults=None):
    if args.config is None and defaults:
        flat = dict(defaults)
        flat.update(env_overrides())
        return build(flat, tol_profile=args.tol_profile)
    return load(args.config, tol_profile=args.tol_profile)


def _values(raw: str) -> list[float]:
    out = []
    for part in raw.split(","):
        part = part.strip()
        if part:
            out.append(float("inf") if part.lower() == "inf" else float(part))
    return out


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    if args.workers < 1:
        parser.error("--workers must be >= 1")
    try:
        if args.command == "run":
            cfg = _load(args)
            res = harness.run(cfg, args.out)
            print(res["csv"])
            print(res["json"])
            return EXIT_OK
        if args.command == "sweep":
            cfg = _load(args)
            param = args.param or cfg.sweep.param
            if param is None:
                parser.error("sweep needs --param or sweep.param")
            try:
                values = _values(args.values) if args.values is not None else list(cfg.sweep.values)
            except ValueError:
                parser.error(f"cannot parse --values {args.values!r}")
            if not values:
                parser.error("sweep needs at least one value")
            index = harness.sweep(cfg, param, values, args.out, workers=args.workers)
            for e in index["entries"]:
                print(Path(args.out) / e["csv"])
            return EXIT_OK
        if args.command == "validate":
            cfg = _load(args, _VALIDATE_DEFAULTS)
            report = harness.validate(cfg, workers=args.workers)
            Path(args.out).mkdir(parents=True, exist_ok=True)
            harness.write_json(Path(args.out) / f"{cfg.stem}_validate.json", report)
            for c in report["checks"]:
                print(f"{c['status'].upper():7s} s={c['s']:<4g} {c['name']}: {c['max_rel_error']} (tol {c['tol']:g})")
            return EXIT_OK if report["passed"] else EXIT_VALIDATE
        if args.command == "limits":
            cfg = _load(args)
            print(json.dumps(harness.limits_report(cfg), indent=2, sort_keys=True))
            return EXIT_OK
    except ConfigError as exc:
        print(f"dephasing: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QuadratureError, SeriesTruncationError, harness.NumericalError) as exc:
        print(f"dephasing: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"dephasing: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    parser.error(f"unknown command {args.command!r}")
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
