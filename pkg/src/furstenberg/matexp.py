"""Matrix exponential and logarithm kernels.

``expm`` is a general scaling-and-squaring Padé exponential and serves as the
oracle for ``structured_transfer``, which exponentiates ``ell * [[0, I], [M, 0]]``
in closed form from the spectral decomposition of the symmetric block ``M``.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import NumericalError, OutsideLogNeighborhood

# Higham (2005) backward-error bounds for the [m/m] Padé approximants.
_THETA = {
    3: 1.495585217958292e-2,
    5: 2.539398330063230e-1,
    7: 9.504178996162932e-1,
    9: 2.097847961257068e0,
    13: 5.371920351148152e0,
}

_PADE = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0),
    13: (64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
         1187353796428800.0, 129060195264000.0, 10559470521600.0,
         670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
         960960.0, 16380.0, 182.0, 1.0),
}

# Below this |mu| the closed-form c(mu), s(mu) switch to Taylor series.
_TAYLOR_REL = 1e-8


def symplectic_form(n):
    """Standard form J = [[0, I_n], [-I_n, 0]]."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def _pade_uv(A, m, eye):
    b = _PADE[m]
    A2 = A @ A
    if m == 13:
        A4 = A2 @ A2
        A6 = A4 @ A2
        U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
                 + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * eye)
        V = (A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
             + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * eye)
        return U, V
    U = b[1] * eye
    V = b[0] * eye
    power = eye
    for k in range(1, m // 2 + 1):
        power = power @ A2
        U = U + b[2 * k + 1] * power
        V = V + b[2 * k] * power
    return A @ U, V


def expm(A):
    """Matrix exponential by scaling and squaring with a diagonal Padé approximant.

    The Padé degree is chosen from the 1-norm of ``A``; for norms above the
    degree-13 bound the argument is scaled by ``2**-s`` and the result squared
    ``s`` times.

    Raises
    ------
    ValueError
        If ``A`` is not square or has non-finite entries.
    NumericalError
        If the result overflows.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expm needs a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("expm argument has non-finite entries")
    eye = np.eye(A.shape[0])
    norm1 = np.linalg.norm(A, 1)
    for m in (3, 5, 7, 9):
        if norm1 <= _THETA[m]:
            U, V = _pade_uv(A, m, eye)
            return np.linalg.solve(V - U, V + U)
    s = max(0, math.ceil(math.log2(norm1 / _THETA[13]))) if norm1 > 0 else 0
    U, V = _pade_uv(A / 2.0**s, 13, eye)
    F = np.linalg.solve(V - U, V + U)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(s):
            F = F @ F
    if not np.all(np.isfinite(F)):
        raise NumericalError(f"expm overflowed (1-norm of argument {norm1:.3e})")
    return F


class EigenDecomposition(NamedTuple):
    values: np.ndarray   # ascending
    vectors: np.ndarray  # orthogonal, columns are eigenvectors


def eigh_sym(M):
    """Spectral decomposition M = Q diag(values) Q^T of a real symmetric matrix."""
    M = np.asarray(M, dtype=float)
    try:
        values, vectors = np.linalg.eigh(M)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed for M=\n{M}") from exc
    return EigenDecomposition(values, vectors)


def cosh_sinh_pairs(mu, ell, threshold=0.0):
    """Scalar functions c(mu) = cosh(ell sqrt mu), s(mu) = sinh(ell sqrt mu)/sqrt mu.

    Both are entire in ``mu``; for ``mu < 0`` they become cos/sin of
    ``ell sqrt(-mu)``. Inside ``|mu| <= threshold`` a 4-term Taylor series is
    used instead of dividing by a tiny square root.
    """
    mu = np.asarray(mu, dtype=float)
    c = np.empty_like(mu)
    s = np.empty_like(mu)

    pos = mu > threshold
    neg = mu < -threshold
    small = ~(pos | neg)

    r = np.sqrt(mu[pos])
    c[pos] = np.cosh(ell * r)
    s[pos] = np.sinh(ell * r) / r

    r = np.sqrt(-mu[neg])
    c[neg] = np.cos(ell * r)
    s[neg] = np.sin(ell * r) / r

    x = ell * ell * mu[small]
    c[small] = 1.0 + x / 2.0 + x * x / 24.0 + x**3 / 720.0
    s[small] = ell * (1.0 + x / 6.0 + x * x / 120.0 + x**3 / 5040.0)
    return c, s


def structured_transfer(M, ell):
    """exp(ell * [[0, I], [M, 0]]) for symmetric ``M`` via M = Q diag(mu) Q^T.

    Returns ``[[Q c Q^T, Q s Q^T], [Q mu s Q^T, Q c Q^T]]`` where ``c`` and ``s``
    are the scalar pairs from :func:`cosh_sinh_pairs`.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"M must be square, got shape {M.shape}")
    if ell <= 0:
        raise ValueError(f"ell must be positive, got {ell!r}")
    mu, Q = eigh_sym(M)
    threshold = _TAYLOR_REL * (1.0 + np.max(np.abs(mu), initial=0.0))
    c, s = cosh_sinh_pairs(mu, ell, threshold)
    C = (Q * c) @ Q.T
    S = (Q * s) @ Q.T
    MS = (Q * (mu * s)) @ Q.T
    return np.block([[C, S], [MS, C]])


def project_sp(X):
    """Nearest element of sp_N(R) in Frobenius norm: (X + J X^T J) / 2."""
    X = np.asarray(X, dtype=float)
    J = symplectic_form(X.shape[0] // 2)
    return 0.5 * (X + J @ X.T @ J)


def _sqrtm_db(A, maxiter=60):
    # Denman-Beavers iteration; A is close to I here so it converges fast.
    Y = A.copy()
    Z = np.eye(A.shape[0])
    for _ in range(maxiter):
        Y_next = 0.5 * (Y + np.linalg.inv(Z))
        Z = 0.5 * (Z + np.linalg.inv(Y))
        if np.max(np.abs(Y_next - Y)) <= 1e-15 * np.max(np.abs(Y_next)):
            return Y_next
        Y = Y_next
    raise NumericalError("matrix square root iteration did not converge")


def logm_near_identity(T, project=True):
    """Principal logarithm of ``T`` with ``||T - I||_2 < 1``.

    Inverse scaling and squaring: square roots are taken until
    ``||T - I||_2 <= 0.25``, then the Mercator series of ``log(I + B)`` is
    summed. When ``project`` is true the result is projected onto sp_N(R).
    """
    T = np.asarray(T, dtype=float)
    n = T.shape[0]
    eye = np.eye(n)
    dist = np.linalg.norm(T - eye, 2)
    if not dist < 1.0:
        raise OutsideLogNeighborhood(
            f"outside log neighborhood: ||T - I||_2 = {dist:.6g} >= 1")

    k = 0
    A = T
    while np.linalg.norm(A - eye, 2) > 0.25:
        A = _sqrtm_db(A)
        k += 1

    B = A - eye
    L = np.zeros_like(B)
    power = eye
    bnorm = np.linalg.norm(B, 2)
    for j in range(1, 200):
        power = power @ B
        L += ((-1) ** (j + 1) / j) * power
        if bnorm**j / j < 1e-18:
            break
    L *= 2.0**k
    if project and n % 2 == 0:
        L = project_sp(L)
    return L
