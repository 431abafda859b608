"""Spectral bounds, critical length and the explicit energy interval.

With ``lambda_min``/``lambda_max`` the extreme eigenvalues of
``M_omega(0) = V + diag(omega)`` over the vertex configurations and
``delta = (lambda_max - lambda_min) / 2``:

    ell_C = min(1, delta_O / delta)
    I(N, ell) = [lambda_max - delta_O / ell, lambda_min + delta_O / ell]

``delta_O`` is the radius of a ball around 0 in sp_N(R) (operator 2-norm) on
which exp is a diffeomorphism onto a good neighbourhood of the identity. It
has no computable value and is a parameter here.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CriticalLengthError
from .matexp import eigh_sym
from .model import build_M, build_X, vertex_configs

DEFAULT_DELTA_O = 1.0


@dataclass
class SpectralBounds:
    lambda_min: float
    lambda_max: float
    delta: float
    per_config: dict = field(default_factory=dict)


@dataclass
class EnergyInterval:
    lo: float
    hi: float
    delta_O: float
    ell: float

    def __contains__(self, E):
        return self.lo <= E <= self.hi

    @property
    def midpoint(self):
        return 0.5 * (self.lo + self.hi)

    def grid(self, points):
        return np.linspace(self.lo, self.hi, points)


def spectral_bounds(spec):
    per_config = {}
    for omega in vertex_configs(spec.N):
        per_config[omega] = eigh_sym(build_M(spec, omega, 0.0)).values
    lam_min = float(min(v[0] for v in per_config.values()))
    lam_max = float(max(v[-1] for v in per_config.values()))
    return SpectralBounds(lam_min, lam_max, 0.5 * (lam_max - lam_min), per_config)


def _check_delta_O(delta_O):
    if not delta_O > 0:
        raise ValueError(f"delta_O must be positive, got {delta_O!r}")


def critical_length_from_bounds(bounds, delta_O):
    _check_delta_O(delta_O)
    if bounds.delta == 0:
        return 1.0
    return min(1.0, delta_O / bounds.delta)


def critical_length(spec, delta_O=DEFAULT_DELTA_O):
    return critical_length_from_bounds(spectral_bounds(spec), delta_O)


def interval_endpoints(bounds, ell, delta_O):
    """Raw endpoints of I(N, ell); may be reversed when ell is too large."""
    r = delta_O / ell
    return bounds.lambda_max - r, bounds.lambda_min + r


def energy_interval(spec, delta_O=DEFAULT_DELTA_O, bounds=None):
    """I(N, ell) for ``spec.ell``; raises CriticalLengthError unless ell < ell_C."""
    if bounds is None:
        bounds = spectral_bounds(spec)
    ell_c = critical_length_from_bounds(bounds, delta_O)
    if not spec.ell < ell_c:
        raise CriticalLengthError(spec.ell, ell_c)
    lo, hi = interval_endpoints(bounds, spec.ell, delta_O)
    return EnergyInterval(lo, hi, float(delta_O), spec.ell)


def log_radius(spec, omega, E):
    """``ell * ||X_omega(E, V)||_2`` with the operator norm on R^{2N}."""
    return spec.ell * np.linalg.norm(build_X(spec, omega, E), 2)


def in_log_neighborhood(spec, omega, E, delta_O=DEFAULT_DELTA_O):
    return bool(log_radius(spec, omega, E) <= delta_O)
