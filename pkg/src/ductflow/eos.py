"""Stiffened-gas equation of state for a two-fluid mixture.

Pressure law ``p = (gamma - 1) rho e - gamma pi`` with the mixture parameters
interpolated from the pure-fluid pairs through

    1 / (gamma - 1)          = phi / (gamma1 - 1) + (1 - phi) / (gamma2 - 1)
    gamma pi / (gamma - 1)   = phi gamma1 pi1 / (gamma1 - 1)
                               + (1 - phi) gamma2 pi2 / (gamma2 - 1)

Every function accepts floats or numpy arrays (broadcasting as usual).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, HyperbolicityError

# phi drift tolerated (and clamped) before it is treated as a bug
PHI_CLAMP_TOL = 1e-12


@dataclass(frozen=True)
class EosParams:
    """Pure-fluid parameters: fluid 1 is tagged by phi = 1, fluid 2 by phi = 0."""

    gamma1: float
    pi1: float
    gamma2: float
    pi2: float

    def __post_init__(self):
        for name in ("gamma1", "gamma2"):
            if not getattr(self, name) > 1.0:
                raise DomainError(f"{name} must be > 1, got {getattr(self, name)}")
        for name in ("pi1", "pi2"):
            if not getattr(self, name) >= 0.0:
                raise DomainError(f"{name} must be >= 0, got {getattr(self, name)}")


class MixtureParams(NamedTuple):
    gamma: float | np.ndarray
    pi: float | np.ndarray


def clamp_phi(phi):
    """Clamp rounding-level drift of phi into [0, 1]; reject anything larger."""
    arr = np.asarray(phi, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < -PHI_CLAMP_TOL) or np.any(arr > 1.0 + PHI_CLAMP_TOL):
        raise DomainError(f"mass fraction outside [0, 1]: {phi!r}")
    if arr.ndim == 0:
        return min(max(float(arr), 0.0), 1.0)
    return np.clip(arr, 0.0, 1.0)


def mixture_params(phi, eos: EosParams) -> MixtureParams:
    """Mixture ``(gamma, pi)`` at mass fraction ``phi``.

    The pure-fluid endpoints are returned verbatim so that phi in {0, 1}
    never picks up interpolation round-off.
    """
    phi = clamp_phi(phi)
    g1, g2 = eos.gamma1, eos.gamma2
    inv = phi / (g1 - 1.0) + (1.0 - phi) / (g2 - 1.0)
    gamma = 1.0 + 1.0 / inv
    rhs = phi * g1 * eos.pi1 / (g1 - 1.0) + (1.0 - phi) * g2 * eos.pi2 / (g2 - 1.0)
    pi = rhs * (gamma - 1.0) / gamma
    if np.ndim(phi) == 0:
        if phi == 1.0:
            return MixtureParams(g1, eos.pi1)
        if phi == 0.0:
            return MixtureParams(g2, eos.pi2)
        return MixtureParams(float(gamma), float(pi))
    gamma = np.where(phi == 1.0, g1, np.where(phi == 0.0, g2, gamma))
    pi = np.where(phi == 1.0, eos.pi1, np.where(phi == 0.0, eos.pi2, pi))
    return MixtureParams(gamma, pi)


def _require_positive(values, what, error):
    values = np.asarray(values)
    bad = np.flatnonzero(~(values > 0.0).ravel())
    if bad.size:
        i = int(bad[0])
        where = f" at index {i}" if values.ndim else ""
        raise error(f"{what} must be positive{where}, got {float(values.ravel()[i])!r}")


def _check_rho(rho):
    _require_positive(rho, "density", DomainError)


def _check_hyperbolic(p, pi):
    _require_positive(p + pi, "p + pi", HyperbolicityError)


def pressure(rho, e, phi, eos: EosParams):
    _check_rho(rho)
    gamma, pi = mixture_params(phi, eos)
    return (gamma - 1.0) * rho * e - gamma * pi


def internal_energy(rho, p, phi, eos: EosParams):
    """Specific internal energy, the exact inverse of :func:`pressure`."""
    _check_rho(rho)
    gamma, pi = mixture_params(phi, eos)
    return (p + gamma * pi) / ((gamma - 1.0) * rho)


def sound_speed(rho, p, phi, eos: EosParams):
    """``c = sqrt(gamma (p + pi) / rho)``.

    This is ``c**2 = dp/drho`` at constant entropy and phi for the
    stiffened-gas law.
    """
    _check_rho(rho)
    gamma, pi = mixture_params(phi, eos)
    _check_hyperbolic(p, pi)
    return np.sqrt(gamma * (p + pi) / rho)


def entropy(rho, p, phi, eos: EosParams):
    """``s = (p + pi) rho**(-gamma)``."""
    _check_rho(rho)
    gamma, pi = mixture_params(phi, eos)
    _check_hyperbolic(p, pi)
    return (p + pi) * rho ** (-gamma)


def pressure_from_entropy(rho, s, phi, eos: EosParams):
    _check_rho(rho)
    if np.any(~(np.asarray(s) > 0.0)):
        raise DomainError(f"entropy must be positive, got {s!r}")
    gamma, pi = mixture_params(phi, eos)
    return s * rho**gamma - pi


def enthalpy(rho, p, phi, eos: EosParams):
    """Specific enthalpy ``h = e + p / rho = gamma (p + pi) / ((gamma - 1) rho)``."""
    _check_rho(rho)
    gamma, pi = mixture_params(phi, eos)
    _check_hyperbolic(p, pi)
    return internal_energy(rho, p, phi, eos) + p / rho


def enthalpy_from_entropy(rho, s, phi, eos: EosParams):
    """``h(rho, s, phi) = gamma / (gamma - 1) * s * rho**(gamma - 1)``."""
    _check_rho(rho)
    gamma, _ = mixture_params(phi, eos)
    return gamma / (gamma - 1.0) * s * rho ** (gamma - 1.0)
