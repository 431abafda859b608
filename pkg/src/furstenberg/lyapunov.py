"""Lyapunov spectrum of the random transfer-matrix cocycle.

Exponents are reported per unit length: accumulated log-stretches divided by
``steps * ell``. Error bars come from batch means over contiguous blocks of
the run.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import propagate_frame
from .errors import NumericalError
from .model import transfer_matrix, vertex_configs
from .parallel import derive_seed, ordered_map

MIN_BATCHES = 20
DEFAULT_Z = 3.0

SEPARATED = "separated"
NOT_SEPARATED = "not_separated"
INCONCLUSIVE = "inconclusive"


@dataclass
class LyapunovEstimate:
    exponents: np.ndarray
    std_errors: np.ndarray
    steps: int
    seed: int
    E: float
    reorth_period: int
    ell: float = float("nan")
    error: str | None = None

    @property
    def N(self):
        return len(self.exponents) // 2

    def pairing_defects(self):
        """|gamma_i + gamma_{2N+1-i}| and the matching combined standard errors."""
        g, se = self.exponents, self.std_errors
        defect = np.abs(g + g[::-1])[: self.N]
        comb = np.hypot(se, se[::-1])[: self.N]
        return defect, comb


@dataclass
class SeparabilityReport:
    gaps: np.ndarray
    z_scores: np.ndarray
    verdict: str
    z_threshold: float = DEFAULT_Z
    combined_errors: np.ndarray = field(default=None, repr=False)


def _sample_indices(rng, steps, N, p):
    bits = rng.random((steps, N)) < p
    weights = 1 << np.arange(N - 1, -1, -1)
    return bits.astype(np.int64) @ weights


def lyapunov_spectrum(spec, E, steps, seed, reorth_period=1, n_batches=MIN_BATCHES):
    """Benettin/QR estimate of all 2N exponents at energy ``E``.

    The cell configurations are i.i.d. Bernoulli(``spec.bernoulli_p``) per
    channel and drawn from ``numpy.random.default_rng(seed)``. The orthonormal
    frame is re-orthonormalized every ``reorth_period`` cells.
    """
    if reorth_period < 1 or steps < reorth_period:
        raise ValueError(
            f"need steps >= reorth_period >= 1, got steps={steps}, "
            f"reorth_period={reorth_period}")
    N = spec.N
    n = 2 * N
    Ts = np.stack([transfer_matrix(spec, omega, E) for omega in vertex_configs(N)])
    rng = np.random.default_rng(seed)
    idx = _sample_indices(rng, steps, N, spec.bernoulli_p)

    n_blocks = math.ceil(steps / reorth_period)
    logs = np.empty((n_blocks, n))
    block_len = np.empty(n_blocks, dtype=np.int64)
    failed = propagate_frame(Ts, idx, reorth_period, logs, block_len)
    if failed >= 0:
        raise NumericalError(
            f"frame overflowed or collapsed at step {failed}; reduce reorth_period "
            f"(currently {reorth_period})")

    exponents = logs.sum(axis=0) / (steps * spec.ell)

    nb = min(n_batches, n_blocks)
    if nb >= 2:
        parts = np.array_split(np.arange(n_blocks), nb)
        batch = np.array([logs[p].sum(axis=0) / (block_len[p].sum() * spec.ell)
                          for p in parts])
        std_errors = batch.std(axis=0, ddof=1) / math.sqrt(nb)
    else:
        std_errors = np.full(n, np.nan)

    order = np.argsort(-exponents, kind="stable")
    return LyapunovEstimate(exponents=exponents[order], std_errors=std_errors[order],
                            steps=int(steps), seed=int(seed), E=float(E),
                            reorth_period=int(reorth_period), ell=spec.ell)


def separability_check(estimate, N, z_threshold=DEFAULT_Z):
    """Test gamma_1 > ... > gamma_N > 0 gap by gap.

    Gap i compares gamma_i with gamma_{i+1}; the last gap compares gamma_N
    with 0. Each gap is divided by its combined standard error.
    """
    g = np.asarray(estimate.exponents, dtype=float)
    se = np.asarray(estimate.std_errors, dtype=float)
    if g.shape != (2 * N,) or se.shape != (2 * N,):
        raise ValueError(f"estimate has {g.size} exponents, expected {2 * N}")
    upper = np.append(g[1:N], 0.0)
    gaps = g[:N] - upper
    comb = np.append(np.hypot(se[: N - 1], se[1:N]), se[N - 1])

    if not np.all(np.isfinite(g)) or not np.all(np.isfinite(comb)) or np.any(comb == 0):
        z = np.full(N, np.nan)
        verdict = INCONCLUSIVE
    else:
        z = gaps / comb
        verdict = SEPARATED if np.all(z >= z_threshold) else NOT_SEPARATED
    return SeparabilityReport(gaps=gaps, z_scores=z, verdict=verdict,
                              z_threshold=z_threshold, combined_errors=comb)


def _sweep_one(args):
    spec, E, steps, seed, reorth_period = args
    try:
        return lyapunov_spectrum(spec, E, steps, seed, reorth_period)
    except (NumericalError, FloatingPointError, np.linalg.LinAlgError) as exc:
        nan = np.full(2 * spec.N, np.nan)
        return LyapunovEstimate(nan, nan.copy(), int(steps), int(seed), float(E),
                                int(reorth_period), spec.ell, error=str(exc))


def energy_sweep(spec, grid, steps, seed, reorth_period=1, workers=1):
    """One estimate per grid energy; energy ``i`` uses ``derive_seed(seed, i)``."""
    grid = [float(E) for E in grid]
    if not grid:
        raise ValueError("energy grid is empty")
    tasks = [(spec, E, steps, derive_seed(seed, i), reorth_period)
             for i, E in enumerate(grid)]
    return ordered_map(_sweep_one, tasks, workers)


def sweep_header(N):
    return (["E"] + [f"gamma_{i}" for i in range(1, 2 * N + 1)]
            + [f"se_{i}" for i in range(1, 2 * N + 1)]
            + ["steps", "seed", "verdict", "error"])


def sweep_rows(estimates, N, z_threshold=DEFAULT_Z):
    for est in estimates:
        verdict = separability_check(est, N, z_threshold).verdict if est.error is None else "error"
        yield ([repr(est.E)] + [repr(float(x)) for x in est.exponents]
               + [repr(float(x)) for x in est.std_errors]
               + [str(est.steps), str(est.seed), verdict, est.error or ""])


def parse_sweep_rows(rows, N, reorth_period=1, ell=float("nan")):
    """Inverse of :func:`sweep_rows`; returns (estimates, verdicts)."""
    estimates, verdicts = [], []
    n = 2 * N
    for row in rows:
        vals = [float(x) for x in row[1:1 + 2 * n]]
        estimates.append(LyapunovEstimate(
            exponents=np.array(vals[:n]), std_errors=np.array(vals[n:]),
            steps=int(row[1 + 2 * n]), seed=int(row[2 + 2 * n]), E=float(row[0]),
            reorth_period=reorth_period, ell=ell, error=row[4 + 2 * n] or None))
        verdicts.append(row[3 + 2 * n])
    return estimates, verdicts


def write_sweep_csv(fh, estimates, N, z_threshold=DEFAULT_Z):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(sweep_header(N))
    w.writerows(sweep_rows(estimates, N, z_threshold))
