import math

import numpy as np
import pytest
import scipy.linalg

from furstenberg.errors import NumericalError, OutsideLogNeighborhood
from furstenberg.liealg import is_in_sp
from furstenberg.matexp import (cosh_sinh_pairs, eigh_sym, expm, logm_near_identity,
                                project_sp, structured_transfer)
from furstenberg.model import ModelSpec, build_X, sample_symmetric, transfer_matrix


def hamiltonian(M):
    N = M.shape[0]
    return np.block([[np.zeros((N, N)), np.eye(N)], [M, np.zeros((N, N))]])


def taylor_expm(A, terms=60):
    out = np.eye(A.shape[0])
    term = np.eye(A.shape[0])
    for k in range(1, terms):
        term = term @ A / k
        out = out + term
    return out


def random_sp(rng, N, scale=1.0):
    S = rng.normal(size=(2 * N, 2 * N))
    S = S + S.T
    J = np.block([[np.zeros((N, N)), np.eye(N)], [-np.eye(N), np.zeros((N, N))]])
    return scale * (J @ S) / np.linalg.norm(J @ S, 2)


class TestExpm:
    def test_zero(self):
        np.testing.assert_array_equal(expm(np.zeros((4, 4))), np.eye(4))

    def test_nilpotent(self):
        np.testing.assert_allclose(expm([[0, 1], [0, 0]]), [[1, 1], [0, 1]], atol=1e-15)

    def test_diagonal(self):
        np.testing.assert_allclose(expm(np.diag([1.0, -1.0])),
                                   np.diag([math.e, 1 / math.e]), rtol=1e-14)

    @pytest.mark.parametrize("scale", [1e-3, 0.1, 0.5, 1.5, 4.0, 12.0, 50.0])
    def test_against_scipy(self, rng, scale):
        for n in (2, 4, 6, 8):
            A = rng.normal(size=(n, n))
            A *= scale / np.linalg.norm(A, 2)
            ref = scipy.linalg.expm(A)
            np.testing.assert_allclose(expm(A), ref, rtol=1e-12, atol=1e-12 * np.abs(ref).max())

    def test_against_taylor(self, rng):
        for _ in range(10):
            A = rng.normal(size=(4, 4)) * 0.3
            np.testing.assert_allclose(expm(A), taylor_expm(A), rtol=1e-13, atol=1e-14)

    def test_overflow_reported(self):
        with pytest.raises(NumericalError, match="overflow"):
            expm(np.diag([800.0, 0.0]))

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            expm([[np.nan, 0], [0, 0]])


class TestStructuredTransfer:
    def test_zero_branch(self):
        np.testing.assert_allclose(structured_transfer([[0.0]], 0.5), [[1, 0.5], [0, 1]])

    def test_positive_branch(self):
        c, s = math.cosh(1), math.sinh(1)
        np.testing.assert_allclose(structured_transfer([[1.0]], 1.0), [[c, s], [s, c]],
                                   rtol=1e-15)

    def test_two_by_two_against_expm(self):
        M = np.array([[1.0, 1.0], [1.0, 0.0]])
        T = structured_transfer(M, 0.2)
        np.testing.assert_allclose(T, expm(0.2 * hamiltonian(M)), atol=1e-11, rtol=0)

    def test_random_against_expm(self, rng):
        for k in range(100):
            N = int(rng.integers(1, 5))
            M = sample_symmetric(N, 1000 + k) * rng.uniform(0.1, 5)
            ell = float(rng.uniform(1e-3, 1.0))
            T = structured_transfer(M, ell)
            ref = expm(ell * hamiltonian(M))
            assert np.max(np.abs(T - ref)) <= 1e-10 * (1 + np.abs(T).max())

    def test_singular_M(self):
        # rank-deficient M hits the Taylor branch for one eigenvalue
        M = np.array([[1.0, 1.0], [1.0, 1.0]])
        np.testing.assert_allclose(structured_transfer(M, 0.7), expm(0.7 * hamiltonian(M)),
                                   atol=1e-13)

    def test_composition(self, rng):
        for k in range(20):
            N = int(rng.integers(1, 5))
            M = sample_symmetric(N, k)
            a, b = rng.uniform(0.05, 0.6, 2)
            T = structured_transfer(M, a + b)
            np.testing.assert_allclose(structured_transfer(M, a) @ structured_transfer(M, b), T,
                                       atol=1e-9 * (1 + np.abs(T).max()))


class TestScalarPairs:
    @pytest.mark.parametrize("mu", [1e-12, -1e-12, 0.0])
    def test_continuity_at_zero(self, mu):
        ell = 0.8
        c, s = cosh_sinh_pairs(np.array([mu]), ell, threshold=1e-8)
        assert abs(s[0] - ell) <= 1e-8 * ell
        assert abs(c[0] - 1) <= 1e-8

    def test_taylor_matches_closed_form_at_switch(self):
        ell = 1.0
        for mu in (2e-8, -2e-8, 1e-6, -1e-6):
            c_t, s_t = cosh_sinh_pairs(np.array([mu]), ell, threshold=1.0)
            c_e, s_e = cosh_sinh_pairs(np.array([mu]), ell, threshold=0.0)
            assert c_t[0] == pytest.approx(c_e[0], rel=1e-12)
            assert s_t[0] == pytest.approx(s_e[0], rel=1e-8)


def test_eigh_sym_reconstruction(rng):
    for k in range(20):
        M = sample_symmetric(int(rng.integers(1, 6)), k)
        mu, Q = eigh_sym(M)
        assert np.all(np.diff(mu) >= 0)
        assert np.max(np.abs(Q @ Q.T - np.eye(len(mu)))) <= 1e-10
        assert np.max(np.abs((Q * mu) @ Q.T - M)) <= 1e-9 * (1 + np.abs(M).max())


class TestLogm:
    def test_identity(self):
        np.testing.assert_array_equal(logm_near_identity(np.eye(4)), np.zeros((4, 4)))

    def test_nilpotent(self):
        np.testing.assert_allclose(logm_near_identity(np.array([[1, 0.5], [0, 1.0]])),
                                   [[0, 0.5], [0, 0]], atol=1e-15)

    def test_transfer_round_trip(self, rng):
        hits = 0
        for k in range(200):
            N = int(rng.integers(1, 4))
            V = sample_symmetric(N, k)
            omega = tuple(int(x) for x in rng.integers(0, 2, N))
            E = float(rng.normal())
            X = build_X(ModelSpec(N=N, ell=1.0, V=V), omega, E)
            ell = 0.5 * float(rng.uniform(0.05, 1.0)) / np.linalg.norm(X, 2)
            T = transfer_matrix(ModelSpec(N=N, ell=ell, V=V), omega, E)
            L = logm_near_identity(T)
            np.testing.assert_allclose(L, ell * X, atol=1e-8, rtol=0)
            assert is_in_sp(L, 1e-12)
            hits += 1
        assert hits == 200

    def test_against_scipy(self, rng):
        for _ in range(20):
            X = random_sp(rng, 2, scale=0.45)
            T = scipy.linalg.expm(X)
            np.testing.assert_allclose(logm_near_identity(T), scipy.linalg.logm(T).real,
                                       atol=1e-10)
            np.testing.assert_allclose(logm_near_identity(T), X, atol=1e-10)

    def test_exp_of_log(self, rng):
        for _ in range(20):
            T = expm(random_sp(rng, 3, scale=0.5))
            np.testing.assert_allclose(expm(logm_near_identity(T)), T, atol=1e-9)

    def test_outside_neighborhood(self):
        with pytest.raises(OutsideLogNeighborhood, match="outside log neighborhood"):
            logm_near_identity(np.diag([3.0, 1 / 3.0]))


def test_project_sp_is_projection(rng):
    A = rng.normal(size=(6, 6))
    P = project_sp(A)
    assert is_in_sp(P, 1e-14)
    np.testing.assert_allclose(project_sp(P), P, atol=1e-15)
    X = random_sp(rng, 3)
    np.testing.assert_allclose(project_sp(X), X, atol=1e-15)
