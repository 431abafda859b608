import itertools
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from furstenberg.errors import CriticalLengthError
from furstenberg.interval import (critical_length, critical_length_from_bounds, energy_interval, in_log_neighborhood,
                                  interval_endpoints, log_radius, spectral_bounds)
from furstenberg.model import ModelSpec, canonical_V0, sample_symmetric


def brute_bounds(V):
    N = V.shape[0]
    eigs = [np.linalg.eigvals(V + np.diag(w)).real
            for w in itertools.product((0.0, 1.0), repeat=N)]
    return min(e.min() for e in eigs), max(e.max() for e in eigs)


def free(ell=0.5):
    return ModelSpec(N=1, ell=ell, V=[[0.0]])


class TestSpectralBounds:
    def test_free_n1(self):
        b = spectral_bounds(free())
        assert (b.lambda_min, b.lambda_max, b.delta) == (0.0, 1.0, 0.5)

    def test_v0_zero_config(self, v0_spec):
        np.testing.assert_allclose(spectral_bounds(v0_spec).per_config[(0, 0)], [-1, 1])

    def test_v0_all_configs(self, v0_spec):
        b = spectral_bounds(v0_spec)
        golden = (1 + math.sqrt(5)) / 2
        expected = {(0, 0): [-1, 1], (0, 1): [1 - golden, golden],
                    (1, 0): [1 - golden, golden], (1, 1): [0, 2]}
        for w, vals in expected.items():
            np.testing.assert_allclose(b.per_config[w], vals, atol=1e-14)
        assert b.lambda_min == pytest.approx(-1.0, abs=1e-14)
        assert b.lambda_max == pytest.approx(2.0, abs=1e-14)
        assert b.delta == pytest.approx(1.5, abs=1e-14)

    @pytest.mark.parametrize("seed", range(10))
    def test_against_brute_force(self, seed):
        V = sample_symmetric(3, seed)
        b = spectral_bounds(ModelSpec(N=3, ell=0.1, V=V))
        lo, hi = brute_bounds(V)
        assert b.lambda_min == pytest.approx(lo, abs=1e-12)
        assert b.lambda_max == pytest.approx(hi, abs=1e-12)
        all_vals = np.concatenate(list(b.per_config.values()))
        assert (b.lambda_min, b.lambda_max) == (all_vals.min(), all_vals.max())


class TestCriticalLength:
    def test_free(self):
        assert critical_length(free(), 1.0) == 1.0

    def test_ratio(self):
        # delta = 0.5 for the free N=1 model
        assert critical_length(free(), 0.1) == pytest.approx(0.2)

    def test_degenerate_delta(self):
        # the {0,1} shifts always give delta >= 1/2, so set delta = 0 on the bounds
        b = spectral_bounds(free())
        b.delta = 0.0
        assert critical_length_from_bounds(b, 0.3) == 1.0

    def test_bad_delta_O(self):
        with pytest.raises(ValueError):
            critical_length(free(), 0.0)


class TestEnergyInterval:
    def test_free_half(self):
        I = energy_interval(free(0.5), 1.0)
        assert (I.lo, I.hi) == (-1.0, 2.0)

    def test_free_near_critical(self):
        I = energy_interval(free(0.99), 1.0)
        assert I.lo == pytest.approx(1 - 1 / 0.99)
        assert I.hi == pytest.approx(1 / 0.99)

    def test_at_critical_length(self):
        with pytest.raises(CriticalLengthError) as err:
            energy_interval(free(1.0), 1.0)
        assert err.value.ell == 1.0 and err.value.ell_c == 1.0
        assert "ell=1.0" in str(err.value) and "ell_C=1.0" in str(err.value)

    def test_v0(self, v0_spec):
        I = energy_interval(v0_spec, 1.0)
        assert I.lo == pytest.approx(-8.0) and I.hi == pytest.approx(9.0)


class TestLogNeighborhood:
    def test_midpoint_small_ell(self, v0_spec):
        spec = ModelSpec(N=2, ell=0.05, V=v0_spec.V)
        E = energy_interval(spec, 1.0).midpoint
        for w in [(0, 0), (0, 1), (1, 0), (1, 1)]:
            assert in_log_neighborhood(spec, w, E, 1.0)

    def test_shrinking_ell(self):
        for ell in (0.5, 0.1, 0.01, 0.001):
            r = log_radius(ModelSpec(N=1, ell=ell, V=[[0.0]]), (1,), -30.0)
            assert r == pytest.approx(ell * log_radius(ModelSpec(N=1, ell=1.0, V=[[0.0]]),
                                                       (1,), -30.0))
        assert in_log_neighborhood(ModelSpec(N=1, ell=1e-3, V=[[0.0]]), (1,), -30.0, 1.0)

    def test_far_outside(self, v0_spec):
        b = spectral_bounds(v0_spec)
        E = b.lambda_max + 10 * 1.0 / v0_spec.ell
        for w in [(0, 0), (1, 1)]:
            assert not in_log_neighborhood(v0_spec, w, E, 1.0)
            # the 2-norm dominates sqrt|mu - E| for every eigenvalue
            assert log_radius(v0_spec, w, E) >= v0_spec.ell * math.sqrt(E - b.lambda_max)


symmetric = st.builds(
    lambda N, seed, scale: sample_symmetric(N, seed) * scale,
    st.integers(1, 4), st.integers(0, 2**31), st.floats(0.01, 5.0))


@settings(max_examples=500, deadline=None)
@given(V=symmetric, ell=st.floats(1e-3, 2.0), delta_O=st.floats(1e-2, 5.0),
       shrink=st.floats(0.05, 0.95), shift=st.floats(-10, 10))
def test_interval_algebra(V, ell, delta_O, shrink, shift):
    spec = ModelSpec(N=V.shape[0], ell=ell, V=V)
    b = spectral_bounds(spec)
    ell_c = critical_length(spec, delta_O)
    lo, hi = interval_endpoints(b, ell, delta_O)
    assert hi - lo == pytest.approx(2 * delta_O / ell - 2 * b.delta, abs=1e-9 * (1 + delta_O / ell))
    assume(abs(ell - ell_c) > 1e-9 and abs(ell - delta_O / b.delta) > 1e-9)

    if ell < ell_c:
        I = energy_interval(spec, delta_O)
        assert I.lo <= I.hi
        # shrinking ell widens the interval
        J = energy_interval(ModelSpec(N=spec.N, ell=ell * shrink, V=V), delta_O)
        assert J.lo <= I.lo and J.hi >= I.hi
        # every vertex eigenvalue stays within delta_O / ell of every interval energy
        vals = np.concatenate(list(b.per_config.values()))
        for E in np.linspace(I.lo, I.hi, 5):
            assert np.max(np.abs(vals - E)) <= delta_O / ell * (1 + 1e-12) + 1e-12
        # translation covariance under V -> V + c I
        shifted = ModelSpec(N=spec.N, ell=ell, V=V + shift * np.eye(spec.N))
        K = energy_interval(shifted, delta_O)
        scale = 1e-12 * (1 + abs(shift) + abs(I.lo) + abs(I.hi))
        assert K.lo - I.lo == pytest.approx(shift, abs=scale)
        assert K.hi - I.hi == pytest.approx(shift, abs=scale)
    else:
        with pytest.raises(CriticalLengthError):
            energy_interval(spec, delta_O)
    # raw endpoints are ordered exactly when ell <= delta_O / delta
    assert (lo <= hi) == (b.delta == 0 or ell < delta_O / b.delta)
