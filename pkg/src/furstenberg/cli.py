"""Command-line front end.

Result files carry their run manifest: CSV outputs start with one
``#``-prefixed JSON line, JSON outputs hold it under ``"manifest"``.

Exit codes: 0 success, 2 usage error, 3 spec error, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .errors import CriticalLengthError, NumericalError, SpecError
from .interval import critical_length_from_bounds, energy_interval, spectral_bounds
from .liealg import DEFAULT_TOL, lie_closure
from .lyapunov import DEFAULT_Z, energy_sweep, write_sweep_csv
from .model import load_spec, vertex_generators
from .parallel import resolve_workers
from .scanner import genericity_trial, scan_energies, write_scan_csv

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SPEC = 3
EXIT_NUMERIC = 4


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    command: str
    spec_path: str | None
    parameters: dict = field(default_factory=dict)
    output_path: str | None = None
    artifact_version: str = __version__

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)


def write_csv_with_manifest(path, manifest, write_body):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("# " + manifest.to_json() + "\n")
        write_body(fh)


def read_csv_with_manifest(path):
    """Return ``(manifest dict, header, data rows)`` of a result CSV."""
    with open(path, encoding="utf-8", newline="") as fh:
        first = fh.readline()
        if not first.startswith("# "):
            raise ValueError(f"{path}: missing manifest line")
        manifest = json.loads(first[2:])
        reader = csv.reader(fh)
        header = next(reader)
        return manifest, header, list(reader)


def _grid(lo, hi, points, min_points=2):
    if points < min_points:
        raise UsageError(f"--points must be >= {min_points}, got {points}")
    if points == 1:
        if lo > hi:
            raise UsageError("--e-lo must not exceed --e-hi")
        return np.array([lo])
    if not lo < hi:
        raise UsageError(f"--e-lo must be < --e-hi, got {lo} and {hi}")
    return np.linspace(lo, hi, points)


def _workers(args):
    try:
        return resolve_workers(args.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_interval(args):
    spec = load_spec(args.spec)
    bounds = spectral_bounds(spec)
    ell_c = critical_length_from_bounds(bounds, args.delta_o)
    result = {"N": spec.N, "ell": spec.ell, "delta_O": args.delta_o,
              "lambda_min": bounds.lambda_min, "lambda_max": bounds.lambda_max,
              "delta": bounds.delta, "ell_C": ell_c}
    print(f"lambda_min = {bounds.lambda_min:.12g}")
    print(f"lambda_max = {bounds.lambda_max:.12g}")
    print(f"delta      = {bounds.delta:.12g}")
    print(f"ell_C      = {ell_c:.12g}  (delta_O = {args.delta_o:g})")
    try:
        interval = energy_interval(spec, args.delta_o, bounds)
    except CriticalLengthError as exc:
        result["error"] = str(exc)
        print(json.dumps(result, sort_keys=True))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    result["interval"] = [interval.lo, interval.hi]
    print(f"I(N, ell)  = [{interval.lo:.12g}, {interval.hi:.12g}]  (ell = {spec.ell:g})")
    print(json.dumps(result, sort_keys=True))
    return EXIT_OK


def cmd_scan(args):
    grid = _grid(args.e_lo, args.e_hi, args.points)
    workers = _workers(args)
    spec = load_spec(args.spec)
    records = scan_energies(spec, grid, args.delta_o, args.tol, workers=workers)
    manifest = RunManifest("scan", args.spec, {
        "e_lo": args.e_lo, "e_hi": args.e_hi, "points": args.points,
        "delta_O": args.delta_o, "tol": args.tol}, args.out)
    write_csv_with_manifest(args.out, manifest, lambda fh: write_scan_csv(fh, records))
    n_gen = sum(r.generates for r in records)
    n_ind = sum(r.indeterminate for r in records)
    print(f"{len(records)} energies: {n_gen} generate, {n_ind} indeterminate -> {args.out}")
    return EXIT_NUMERIC if any(r.error for r in records) else EXIT_OK


def cmd_lyapunov(args):
    if args.steps < 100:
        raise UsageError(f"--steps must be >= 100, got {args.steps}")
    if args.reorth_period < 1 or args.reorth_period > args.steps:
        raise UsageError("--reorth-period must lie in [1, steps]")
    grid = _grid(args.e_lo, args.e_hi, args.points, min_points=1)
    workers = _workers(args)
    spec = load_spec(args.spec)
    estimates = energy_sweep(spec, grid, args.steps, args.seed, args.reorth_period,
                             workers=workers)
    manifest = RunManifest("lyapunov", args.spec, {
        "e_lo": args.e_lo, "e_hi": args.e_hi, "points": args.points,
        "steps": args.steps, "seed": args.seed, "reorth_period": args.reorth_period,
        "z_threshold": args.z_threshold, "normalization": "per_unit_length"}, args.out)
    write_csv_with_manifest(args.out, manifest,
                            lambda fh: write_sweep_csv(fh, estimates, spec.N, args.z_threshold))
    failed = sum(e.error is not None for e in estimates)
    print(f"{len(estimates)} energies ({failed} failed) -> {args.out}")
    return EXIT_NUMERIC if failed else EXIT_OK


def cmd_genericity(args):
    if args.samples < 1:
        raise UsageError(f"--samples must be >= 1, got {args.samples}")
    if args.n < 1:
        raise UsageError(f"--n must be >= 1, got {args.n}")
    grid = _grid(args.e_lo, args.e_hi, args.points, min_points=1)
    workers = _workers(args)
    report = genericity_trial(args.n, grid, args.samples, args.seed, workers=workers)
    manifest = RunManifest("genericity", None, {
        "N": args.n, "e_lo": args.e_lo, "e_hi": args.e_hi, "points": args.points,
        "samples": args.samples, "seed": args.seed}, args.out)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump({"manifest": asdict(manifest), "report": report.to_dict()}, fh,
                  indent=2, sort_keys=True)
        fh.write("\n")
    print(f"success_fraction = {report.success_fraction:.6f} "
          f"({len(report.failures)} failures) -> {args.out}")
    return EXIT_OK


def cmd_lie_check(args):
    spec = load_spec(args.spec)
    span = lie_closure(vertex_generators(spec, args.energy), args.tol)
    print(json.dumps({"E": args.energy, "dim": span.dim, "target_dim": span.target_dim,
                      "generates": span.generates, "indeterminate": span.indeterminate},
                     sort_keys=True))
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="furstenberg", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def workers_flag(sp):
        sp.add_argument("--workers", type=int, default=None,
                        help="worker processes (default: $FURSTENBERG_WORKERS or CPU count)")

    def grid_flags(sp):
        sp.add_argument("--e-lo", type=float, required=True)
        sp.add_argument("--e-hi", type=float, required=True)
        sp.add_argument("--points", type=int, required=True)

    sp = sub.add_parser("interval", help="spectral bounds, ell_C and I(N, ell)")
    sp.add_argument("spec")
    sp.add_argument("--delta-o", type=float, default=1.0)
    sp.set_defaults(func=cmd_interval)

    sp = sub.add_parser("scan", help="Lie closure verdicts on an energy grid (CSV)")
    sp.add_argument("spec")
    grid_flags(sp)
    sp.add_argument("--delta-o", type=float, default=1.0)
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
    sp.add_argument("--out", required=True)
    workers_flag(sp)
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("lyapunov", help="Lyapunov spectra on an energy grid (CSV)")
    sp.add_argument("spec")
    grid_flags(sp)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--reorth-period", type=int, default=1)
    sp.add_argument("--z-threshold", type=float, default=DEFAULT_Z)
    sp.add_argument("--out", required=True)
    workers_flag(sp)
    sp.set_defaults(func=cmd_lyapunov)

    sp = sub.add_parser("genericity", help="generation test over random V (JSON)")
    sp.add_argument("--n", type=int, required=True)
    grid_flags(sp)
    sp.add_argument("--samples", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    workers_flag(sp)
    sp.set_defaults(func=cmd_genericity)

    sp = sub.add_parser("lie-check", help="closure test of a spec at one energy")
    sp.add_argument("spec")
    sp.add_argument("--energy", type=float, required=True)
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
    sp.set_defaults(func=cmd_lie_check)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except json.JSONDecodeError as exc:
        print(f"spec error: {args.spec}: invalid JSON at line {exc.lineno}, "
              f"column {exc.colno}: {exc.msg}", file=sys.stderr)
        return EXIT_SPEC
    except (OSError, SpecError) as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except (NumericalError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
