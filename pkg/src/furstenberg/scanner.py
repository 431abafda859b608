"""Energy scans of the generation verdict and Monte Carlo over random V.

For fixed V the vertex family fails to generate sp_N(R) only on a finite set
of energies, and for Lebesgue-almost every V that set is not all of R. The
scans here look for those energies on a grid and refine verdict changes by
bisection.
"""
from __future__ import annotations

import csv
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import NumericalError
from .interval import (DEFAULT_DELTA_O, critical_length_from_bounds, interval_endpoints,
                       log_radius, spectral_bounds)
from .liealg import DEFAULT_TOL, lie_closure
from .model import ModelSpec, sample_symmetric, vertex_configs, vertex_generators
from .parallel import derive_seed, ordered_map


@dataclass
class ScanRecord:
    E: float
    closure_dim: int
    generates: bool
    indeterminate: bool
    in_interval: bool
    norm_check: bool
    error: str | None = None


@dataclass
class GenericityReport:
    N: int
    samples: int
    energies_per_sample: int
    failures: list = field(default_factory=list)   # (seed, E) pairs
    success_fraction: float = 1.0
    indeterminate: list = field(default_factory=list)

    def to_dict(self):
        d = asdict(self)
        d["failures"] = [[int(s), float(E)] for s, E in self.failures]
        d["indeterminate"] = [[int(s), float(E)] for s, E in self.indeterminate]
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(N=d["N"], samples=d["samples"],
                   energies_per_sample=d["energies_per_sample"],
                   failures=[(int(s), float(E)) for s, E in d["failures"]],
                   success_fraction=d["success_fraction"],
                   indeterminate=[(int(s), float(E)) for s, E in d.get("indeterminate", [])])


def _scan_one(spec, E, delta_O, bounds, tol):
    E = float(E)
    lo, hi = interval_endpoints(bounds, spec.ell, delta_O)
    in_interval = spec.ell < critical_length_from_bounds(bounds, delta_O) and lo <= E <= hi
    try:
        span = lie_closure(vertex_generators(spec, E), tol)
        norm_ok = all(log_radius(spec, w, E) <= delta_O for w in vertex_configs(spec.N))
    except (NumericalError, np.linalg.LinAlgError) as exc:
        return ScanRecord(E, 0, False, True, bool(in_interval), False, error=str(exc))
    return ScanRecord(E, span.dim, span.generates, span.indeterminate,
                      bool(in_interval), bool(norm_ok))


def _scan_task(args):
    return _scan_one(*args)


def scan_energies(spec, grid, delta_O=DEFAULT_DELTA_O, tol=DEFAULT_TOL, workers=1):
    """Closure verdict, interval membership and norm predicate at each energy."""
    grid = list(grid)
    if not grid:
        raise ValueError("energy grid is empty")
    bounds = spectral_bounds(spec)
    return ordered_map(_scan_task, [(spec, E, delta_O, bounds, tol) for E in grid], workers)


def _verdict(generator_fn, E, tol):
    span = lie_closure(generator_fn(E), tol)
    return span.generates and not span.indeterminate


def refine_critical(spec, bracket_lo, bracket_hi, tol_E, generator_fn=None, tol=DEFAULT_TOL):
    """Bisect a change of generation verdict down to width ``tol_E``.

    The verdict is "generates and not indeterminate". ``generator_fn(E)``
    overrides the vertex family of ``spec`` (used for synthetic fixtures).
    Returns the midpoint of the final bracket.
    """
    if tol_E <= 0:
        raise ValueError(f"tol_E must be positive, got {tol_E!r}")
    if generator_fn is None:
        def generator_fn(E):
            return vertex_generators(spec, E)
    a, b = sorted((float(bracket_lo), float(bracket_hi)))
    va, vb = _verdict(generator_fn, a, tol), _verdict(generator_fn, b, tol)
    if va == vb:
        raise ValueError(
            f"verdict does not change on [{a!r}, {b!r}] (both {'generate' if va else 'fail'})")
    while b - a > tol_E:
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        if _verdict(generator_fn, m, tol) == va:
            a = m
        else:
            b = m
    return 0.5 * (a + b)


def _genericity_one(args):
    N, grid, seed, tol = args
    V = sample_symmetric(N, seed)
    spec = ModelSpec(N=N, ell=1.0, V=V)
    failed, flagged = [], []
    for E in grid:
        span = lie_closure(vertex_generators(spec, E), tol)
        if not span.generates:
            failed.append((seed, E))
        if span.indeterminate:
            flagged.append((seed, E))
    return failed, flagged


def genericity_trial(N, energy_grid, samples, master_seed, workers=1, tol=DEFAULT_TOL):
    """Generation test at every grid energy for ``samples`` Gaussian V.

    Sample ``k`` uses ``V = sample_symmetric(N, derive_seed(master_seed, k))``;
    each failure is reported as that seed together with the energy.
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    grid = [float(E) for E in energy_grid]
    if not grid:
        raise ValueError("energy grid is empty")
    tasks = [(N, grid, derive_seed(master_seed, k), tol) for k in range(samples)]
    results = ordered_map(_genericity_one, tasks, workers)
    failures = [f for failed, _ in results for f in failed]
    flagged = [f for _, fl in results for f in fl]
    total = samples * len(grid)
    return GenericityReport(N=N, samples=samples, energies_per_sample=len(grid),
                            failures=failures, success_fraction=1.0 - len(failures) / total,
                            indeterminate=flagged)


SCAN_HEADER = ["E", "closure_dim", "generates", "indeterminate", "in_interval",
               "norm_check", "error"]


def _b(x):
    return "true" if x else "false"


def scan_rows(records):
    for r in records:
        yield [repr(r.E), str(r.closure_dim), _b(r.generates), _b(r.indeterminate),
               _b(r.in_interval), _b(r.norm_check), r.error or ""]


def parse_scan_rows(rows):
    out = []
    for row in rows:
        E, dim, gen, ind, inn, nc, err = row
        out.append(ScanRecord(float(E), int(dim), gen == "true", ind == "true",
                              inn == "true", nc == "true", err or None))
    return out


def write_scan_csv(fh, records):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SCAN_HEADER)
    w.writerows(scan_rows(records))


def cross_tabulate(records):
    """Counts of (in_interval, norm_check) combinations over a scan."""
    table = {}
    for r in records:
        key = (r.in_interval, r.norm_check)
        table[key] = table.get(key, 0) + 1
    return table
