"""Model parameters and per-cell matrices.

The operator is ``-d^2/dx^2 (x) I_N + V + sum_n diag(omega^(n)) 1_[0,ell](x - ell n)``
on ``L^2(R) (x) R^N`` with i.i.d. Bernoulli(p) couplings. On one cell the
solution map of ``H u = E u`` for ``(u, u')`` is ``exp(ell X)`` with
``X = [[0, I], [V + diag(omega) - E, 0]]``.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

from .errors import SpecError
from .matexp import structured_transfer, symplectic_form

SYM_TOL = 1e-12
MAX_VERTEX_N = 20


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """Channel count ``N``, cell length ``ell``, interaction ``V`` and Bernoulli law."""

    N: int
    ell: float
    V: np.ndarray
    bernoulli_p: float = 0.5

    def __post_init__(self):
        if isinstance(self.N, bool) or int(self.N) != self.N or self.N < 1:
            raise SpecError(f"N must be a positive integer, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))
        if not np.isfinite(self.ell) or self.ell <= 0:
            raise SpecError(f"ell must be positive, got {self.ell!r}")
        object.__setattr__(self, "ell", float(self.ell))
        if not 0.0 <= self.bernoulli_p <= 1.0:
            raise SpecError(f"bernoulli_p must lie in [0, 1], got {self.bernoulli_p!r}")
        object.__setattr__(self, "bernoulli_p", float(self.bernoulli_p))

        V = np.array(self.V, dtype=float, copy=True)
        if V.ndim == 0 and self.N == 1:
            V = V.reshape(1, 1)
        if V.shape != (self.N, self.N):
            raise SpecError(f"V must have shape ({self.N}, {self.N}), got {V.shape}")
        if not np.all(np.isfinite(V)):
            raise SpecError("V has non-finite entries")
        asym = np.max(np.abs(V - V.T))
        if asym > SYM_TOL:
            raise SpecError(f"V is not symmetric (max |V - V^T| = {asym:.3e})")
        V.setflags(write=False)
        object.__setattr__(self, "V", V)

    def to_dict(self):
        return {"N": self.N, "ell": self.ell, "V": self.V.tolist(),
                "bernoulli_p": self.bernoulli_p}

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(N=data["N"], ell=data["ell"], V=data["V"],
                       bernoulli_p=data.get("bernoulli_p", 0.5))
        except KeyError as exc:
            raise SpecError(f"missing key {exc.args[0]!r} in model spec") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, SpecError):
                raise
            raise SpecError(f"malformed model spec: {exc}") from None


def load_spec(path):
    """Read a ModelSpec from a JSON file.

    ``json.JSONDecodeError`` propagates unchanged so callers can report the
    line and column.
    """
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise SpecError("model spec must be a JSON object")
    return ModelSpec.from_dict(data)


def dump_spec(spec, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(spec.to_dict(), fh, indent=2)
        fh.write("\n")


def check_config(spec, omega):
    """Validate a cell configuration against ``spec`` and return it as a tuple."""
    omega = tuple(int(w) if w in (0, 1) else w for w in omega)
    if len(omega) != spec.N:
        raise SpecError(f"configuration has length {len(omega)}, expected N={spec.N}")
    if any(w not in (0, 1) for w in omega):
        raise SpecError(f"configuration entries must be 0 or 1, got {omega}")
    return omega


def vertex_configs(N):
    """All ``2**N`` configurations in {0,1}^N, lexicographically ordered."""
    if N < 1 or N > MAX_VERTEX_N:
        raise ValueError(f"N must lie in [1, {MAX_VERTEX_N}], got {N}")
    return list(itertools.product((0, 1), repeat=N))


def config_index(omega):
    """Position of ``omega`` in :func:`vertex_configs` order (omega_1 is the high bit)."""
    idx = 0
    for w in omega:
        idx = 2 * idx + w
    return idx


def canonical_V0(N):
    """Tridiagonal symmetric matrix, zero diagonal, ones on the off-diagonals."""
    if N < 1:
        raise ValueError(f"N must be positive, got {N}")
    return np.eye(N, k=1) + np.eye(N, k=-1)


def sample_symmetric(N, seed):
    """Symmetric matrix with i.i.d. standard normal entries on and above the diagonal."""
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.standard_normal((N, N)))
    return upper + np.triu(upper, k=1).T


def build_M(spec, omega, E):
    omega = check_config(spec, omega)
    return spec.V + np.diag(np.asarray(omega, dtype=float) - E)


def build_X(spec, omega, E):
    """Hamiltonian block matrix ``[[0, I_N], [M_omega(E), 0]]``."""
    M = build_M(spec, omega, E)
    N = spec.N
    X = np.zeros((2 * N, 2 * N))
    X[:N, N:] = np.eye(N)
    X[N:, :N] = M
    return X


def transfer_matrix(spec, omega, E):
    """Transfer matrix ``exp(ell X_omega(E, V))`` across one cell."""
    return structured_transfer(build_M(spec, omega, E), spec.ell)


def vertex_generators(spec, E):
    """The family ``{X_omega(E, V)}`` over all vertex configurations."""
    return [build_X(spec, omega, E) for omega in vertex_configs(spec.N)]


def symplectic_defect(T):
    """``||T^T J T - J||_max`` for a 2N x 2N matrix."""
    T = np.asarray(T, dtype=float)
    J = symplectic_form(T.shape[0] // 2)
    return float(np.max(np.abs(T.T @ J @ T - J)))


def is_symplectic(T, tol=1e-9):
    T = np.asarray(T, dtype=float)
    scale = 1.0 + np.max(np.abs(T)) ** 2
    return symplectic_defect(T) <= tol * scale
