"""Numerical test of whether a family of sp_N(R) elements generates sp_N(R).

The generated subalgebra is spanned by left-normed brackets
``[...[[X_a, X_b], X_c]..., X_z]`` of generators, so it is enough to close a
subspace under ``ad`` of the generators only. Directions are added by
Gram-Schmidt against an orthonormal (Frobenius) basis, with a scale-aware
residual threshold standing in for exact rank.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ClosureError
from .matexp import symplectic_form

DEFAULT_TOL = 1e-9
INDETERMINATE_FACTOR = 10.0


def sp_dimension(N):
    return N * (2 * N + 1)


@dataclass
class LieSpan:
    basis: np.ndarray          # (dim, 4N^2), rows orthonormal
    dim: int
    target_dim: int
    closed: bool
    indeterminate: bool = False
    # smallest accepted and largest rejected residual, relative to the scale
    min_accepted: float = np.inf
    max_rejected: float = 0.0

    @property
    def generates(self):
        return self.dim == self.target_dim

    def matrices(self):
        n = int(round(np.sqrt(self.basis.shape[1])))
        return [b.reshape(n, n) for b in self.basis]


def bracket(A, B):
    """Commutator ``AB - BA``."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != B.shape:
        raise ValueError(f"bracket of mismatched shapes {A.shape} and {B.shape}")
    return A @ B - B @ A


def is_in_sp(X, tol=1e-10):
    """Membership test ``||X^T J + J X||_max <= tol (1 + ||X||_max)``."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1] or X.shape[0] % 2:
        raise ValueError(f"expected a square matrix of even size, got {X.shape}")
    J = symplectic_form(X.shape[0] // 2)
    defect = np.max(np.abs(X.T @ J + J @ X))
    return bool(defect <= tol * (1.0 + np.max(np.abs(X))))


class _Basis:
    def __init__(self, size, capacity):
        self.vecs = np.empty((capacity, size))
        self.dim = 0

    def residual(self, v):
        # classical Gram-Schmidt, applied twice for stability
        B = self.vecs[:self.dim]
        r = v - B.T @ (B @ v)
        r = r - B.T @ (B @ r)
        return r

    def add(self, r, norm):
        self.vecs[self.dim] = r / norm
        self.dim += 1


def lie_closure(generators, tol=DEFAULT_TOL, max_passes=None):
    """Smallest Lie subalgebra containing ``generators``, as an orthonormal basis.

    A candidate direction is kept when the norm of its residual after
    projection exceeds ``tol * scale``, where ``scale`` is the geometric mean
    of the generator Frobenius norms. Residuals within a factor 10 of the
    threshold (either side) mark the result as indeterminate.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    gens = [np.asarray(g, dtype=float) for g in generators]
    if not gens:
        raise ValueError("need at least one generator")
    shape = gens[0].shape
    if any(g.shape != shape for g in gens):
        raise ValueError("generators must all have the same shape")
    if len(shape) != 2 or shape[0] != shape[1] or shape[0] % 2:
        raise ValueError(f"generators must be square of even size, got {shape}")

    for i, g in enumerate(gens):
        if not is_in_sp(g):
            raise ValueError(f"generator {i} is not in sp_N(R)")

    n = shape[0]
    target = sp_dimension(n // 2)
    if max_passes is None:
        max_passes = 4 * target

    norms = np.array([np.linalg.norm(g) for g in gens])
    nonzero = norms[norms > 0]
    scale = float(np.exp(np.mean(np.log(nonzero)))) if nonzero.size else 1.0
    threshold = tol * scale

    basis = _Basis(n * n, target)
    min_accepted = np.inf
    max_rejected = 0.0

    def offer(M):
        nonlocal min_accepted, max_rejected
        r = basis.residual(M.ravel())
        rn = np.linalg.norm(r)
        if rn > threshold:
            if basis.dim >= target:
                # more independent directions than sp_N(R) holds
                raise ClosureError(f"residual {rn:.3e} above threshold with a full basis")
            basis.add(r, rn)
            min_accepted = min(min_accepted, rn / scale)
            return True
        max_rejected = max(max_rejected, rn / scale)
        return False

    for g in gens:
        offer(g)

    frontier = list(range(basis.dim))
    passes = 0
    while frontier and basis.dim < target:
        passes += 1
        if passes > max_passes:
            raise ClosureError(f"closure did not stabilize after {max_passes} passes")
        start = basis.dim
        for i in frontier:
            b = basis.vecs[i].reshape(n, n)
            for g in gens:
                offer(b @ g - g @ b)
                if basis.dim >= target:
                    break
            if basis.dim >= target:
                break
        frontier = list(range(start, basis.dim))

    lo, hi = tol / INDETERMINATE_FACTOR, tol * INDETERMINATE_FACTOR
    indeterminate = bool(lo <= min_accepted <= hi or lo <= max_rejected <= hi)
    return LieSpan(basis=basis.vecs[:basis.dim].copy(), dim=basis.dim,
                   target_dim=target, closed=True, indeterminate=indeterminate,
                   min_accepted=float(min_accepted), max_rejected=float(max_rejected))


def generates_sp(generators, tol=DEFAULT_TOL):
    """True iff the Lie closure of ``generators`` is all of sp_N(R)."""
    return lie_closure(generators, tol).generates
