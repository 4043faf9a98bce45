"""Conservative, primitive and stationary state vectors and their conversions.

    W = (A rho, A rho u, A rho E, A rho phi, A)     conservative
    Y = (rho, u, p, phi, A)                         primitive
    Z = (A, phi, s, Q, H)                           stationary invariants

Z is constant across a standing area jump. The map Z -> Y is two-valued
(subsonic and supersonic roots), so :func:`stationary_to_prim` takes an
explicit :class:`FlowRegime`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import astuple, dataclass

import numpy as np

from . import eos as eos_mod
from .eos import EosParams
from .errors import ConvergenceError, InadmissibleStateError, NoRootError

# |Mach - 1| below this is treated as sonic (no regime can be assigned)
SONIC_TOL = 1e-10

ROOT_RTOL = 1e-13
ROOT_MAXITER = 200


class FlowRegime(enum.Enum):
    SUBSONIC = "subsonic"
    SUPERSONIC = "supersonic"


@dataclass(frozen=True, slots=True)
class ConservativeState:
    a_rho: float
    a_rho_u: float
    a_rho_E: float
    a_rho_phi: float
    a: float

    def __post_init__(self):
        if not self.a > 0.0:
            raise InadmissibleStateError(f"area must be positive, got {self.a}", field="a")
        if not self.a_rho > 0.0:
            raise InadmissibleStateError(f"A rho must be positive, got {self.a_rho}", field="a_rho")
        tol = eos_mod.PHI_CLAMP_TOL * self.a_rho
        if not -tol <= self.a_rho_phi <= self.a_rho + tol:
            raise InadmissibleStateError(
                f"A rho phi = {self.a_rho_phi} outside [0, A rho = {self.a_rho}]", field="a_rho_phi"
            )

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self))


@dataclass(frozen=True, slots=True)
class PrimitiveState:
    rho: float
    u: float
    p: float
    phi: float
    a: float

    def __post_init__(self):
        if not self.rho > 0.0:
            raise InadmissibleStateError(f"density must be positive, got {self.rho}", field="rho")
        if not self.a > 0.0:
            raise InadmissibleStateError(f"area must be positive, got {self.a}", field="a")
        if not (math.isfinite(self.u) and math.isfinite(self.p)):
            raise InadmissibleStateError("non-finite velocity or pressure", field="u/p")
        tol = eos_mod.PHI_CLAMP_TOL
        if not -tol <= self.phi <= 1.0 + tol:
            raise InadmissibleStateError(f"phi = {self.phi} outside [0, 1]", field="phi")

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self))

    def replace(self, **changes) -> PrimitiveState:
        values = {f: getattr(self, f) for f in ("rho", "u", "p", "phi", "a")}
        values.update(changes)
        return PrimitiveState(**values)


@dataclass(frozen=True, slots=True)
class StationaryInvariants:
    a: float
    phi: float
    s: float
    q: float
    h_total: float


def check_admissible(y: PrimitiveState, eos: EosParams) -> None:
    _, pi = eos_mod.mixture_params(y.phi, eos)
    if not y.p + pi > 0.0:
        raise InadmissibleStateError(f"p + pi = {y.p + pi} is not positive", field="p")


def cons_to_prim(w: ConservativeState, eos: EosParams) -> PrimitiveState:
    rho = w.a_rho / w.a
    u = w.a_rho_u / w.a_rho
    phi = eos_mod.clamp_phi(w.a_rho_phi / w.a_rho)
    e = w.a_rho_E / w.a_rho - 0.5 * u * u
    p = float(eos_mod.pressure(rho, e, phi, eos))
    y = PrimitiveState(rho, u, p, phi, w.a)
    check_admissible(y, eos)
    return y


def prim_to_cons(y: PrimitiveState, eos: EosParams) -> ConservativeState:
    check_admissible(y, eos)
    e = float(eos_mod.internal_energy(y.rho, y.p, y.phi, eos))
    a_rho = y.a * y.rho
    return ConservativeState(a_rho, a_rho * y.u, a_rho * (e + 0.5 * y.u * y.u), a_rho * y.phi, y.a)


def prim_to_stationary(y: PrimitiveState, eos: EosParams) -> StationaryInvariants:
    s = float(eos_mod.entropy(y.rho, y.p, y.phi, eos))
    h = float(eos_mod.enthalpy(y.rho, y.p, y.phi, eos))
    return StationaryInvariants(y.a, y.phi, s, y.rho * y.a * y.u, h + 0.5 * y.u * y.u)


def mach_number(y: PrimitiveState, eos: EosParams) -> float:
    return y.u / float(eos_mod.sound_speed(y.rho, y.p, y.phi, eos))


def flow_regime(y: PrimitiveState, eos: EosParams) -> FlowRegime:
    """Regime of ``y``; a state within ``SONIC_TOL`` of Mach 1 raises NoRootError."""
    m = abs(mach_number(y, eos))
    if abs(m - 1.0) <= SONIC_TOL:
        raise NoRootError(f"state is sonic (|M| = {m!r}); regime undefined")
    return FlowRegime.SUBSONIC if m < 1.0 else FlowRegime.SUPERSONIC


# -- Z -> Y inversion -------------------------------------------------------


def sonic_density(z: StationaryInvariants, eos: EosParams) -> float:
    """Density at which ``c**2 = (Q / (rho A))**2`` for the given invariants.

    With ``c**2 = gamma s rho**(gamma - 1)`` this is the closed form
    ``rho**(gamma + 1) = q**2 / (gamma s)``, ``q = Q / A``.
    """
    gamma, _ = eos_mod.mixture_params(z.phi, eos)
    q = z.q / z.a
    return (q * q / (gamma * z.s)) ** (1.0 / (gamma + 1.0))


def _residual(rho, z, gamma, q):
    # g(rho) = h(rho, s) + q**2 / (2 rho**2) - H and dg/drho = (c**2 - u**2) / rho
    k = gamma / (gamma - 1.0) * z.s
    h = k * rho ** (gamma - 1.0)
    u = q / rho
    g = h + 0.5 * u * u - z.h_total
    dg = (gamma * z.s * rho ** (gamma - 1.0) - u * u) / rho
    return g, dg


def _safeguarded_newton(f, lo, hi, flo, fhi):
    """Newton iteration kept inside the bracket [lo, hi], bisecting when it strays."""
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise NoRootError(f"root not bracketed on [{lo}, {hi}]")
    x = 0.5 * (lo + hi)
    for _ in range(ROOT_MAXITER):
        fx, dfx = f(x)
        if fx == 0.0:
            return x
        if (fx < 0.0) == (flo < 0.0):
            lo, flo = x, fx
        else:
            hi = x
        step_ok = dfx != 0.0
        if step_ok:
            x_new = x - fx / dfx
            step_ok = lo < x_new < hi
        if not step_ok:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= ROOT_RTOL * abs(x_new) or hi - lo <= ROOT_RTOL * abs(x_new):
            return x_new
        x = x_new
    raise ConvergenceError(f"stationary inversion did not converge in {ROOT_MAXITER} iterations")


def stationary_to_prim(z: StationaryInvariants, regime: FlowRegime, eos: EosParams) -> PrimitiveState:
    """Recover ``Y`` from ``Z`` on the branch selected by ``regime``.

    Solves ``h(rho, s, phi) + Q**2 / (2 rho**2 A**2) = H`` for rho. The
    residual is convex-like with its minimum at the sonic density: the
    subsonic root lies above it, the supersonic root below. At ``Q = 0``
    both branches collapse onto the closed-form rest-state root.

    Raises
    ------
    NoRootError
        If ``H`` is too small for the requested mass flow (choked / sonic).
    """
    if not (z.a > 0.0 and z.s > 0.0):
        raise InadmissibleStateError("stationary invariants need A > 0 and s > 0")
    gamma, _ = eos_mod.mixture_params(z.phi, eos)
    k = gamma / (gamma - 1.0) * z.s
    q = z.q / z.a
    if z.h_total <= 0.0:
        raise NoRootError(f"total enthalpy {z.h_total} must be positive")
    rho_rest = (z.h_total / k) ** (1.0 / (gamma - 1.0))
    rho_s = sonic_density(z, eos) if q != 0.0 else 0.0
    if rho_s == 0.0:
        # no flow, or so little that q**2 underflows: the rest root is exact
        rho = rho_rest
    else:
        f = lambda r: _residual(r, z, gamma, q)  # noqa: E731
        g_s, _ = f(rho_s)
        if g_s >= 0.0:
            raise NoRootError(
                f"no {regime.value} root: H = {z.h_total} is below the sonic bound {z.h_total + g_s}"
            )
        if regime is FlowRegime.SUBSONIC:
            hi = max(rho_rest, rho_s)
            g_hi = f(hi)[0]
            widen = 1e-14
            # g grows without bound above rho_s; rounding can leave g(rho_rest) a hair below zero
            while g_hi <= 0.0 and widen < 1.0:
                hi = max(rho_rest, rho_s) * (1.0 + widen)
                g_hi = f(hi)[0]
                widen *= 10.0
            rho = _safeguarded_newton(f, rho_s, hi, g_s, g_hi)
        else:
            lo = min(abs(q) / math.sqrt(2.0 * z.h_total), rho_s)
            rho = _safeguarded_newton(f, lo, rho_s, f(lo)[0], g_s)
    p = float(eos_mod.pressure_from_entropy(rho, z.s, z.phi, eos))
    return PrimitiveState(rho, q / rho, p, z.phi, z.a)


def stationary_residuals(y: PrimitiveState, z: StationaryInvariants, eos: EosParams) -> dict:
    """Absolute mismatch of the invariants of ``y`` against ``z``."""
    zy = prim_to_stationary(y, eos)
    return {
        "a": abs(zy.a - z.a),
        "phi": abs(zy.phi - z.phi),
        "s": abs(zy.s - z.s),
        "q": abs(zy.q - z.q),
        "h_total": abs(zy.h_total - z.h_total),
    }


# -- array forms used by the time-marching kernels -----------------------------


def cons_to_prim_arrays(w: np.ndarray, eos: EosParams):
    """Columns ``(rho, u, p, phi, a)`` from an ``(N, 5)`` conservative array."""
    a = w[:, 4]
    a_rho = w[:, 0]
    bad = np.flatnonzero(~((a > 0.0) & (a_rho > 0.0)))
    if bad.size:
        i = int(bad[0])
        raise InadmissibleStateError("non-positive density or area", field="a_rho", index=i)
    rho = a_rho / a
    u = w[:, 1] / a_rho
    try:
        phi = eos_mod.clamp_phi(w[:, 3] / a_rho)
    except Exception as exc:
        raise InadmissibleStateError(str(exc), field="a_rho_phi") from None
    e = w[:, 2] / a_rho - 0.5 * u * u
    gamma, pi = eos_mod.mixture_params(phi, eos)
    p = (gamma - 1.0) * rho * e - gamma * pi
    bad = np.flatnonzero(~(p + pi > 0.0))
    if bad.size:
        i = int(bad[0])
        raise InadmissibleStateError(f"p + pi = {p[i] + pi[i]} is not positive", field="p", index=i)
    return rho, u, p, phi, a


def prim_to_cons_arrays(rho, u, p, phi, a, eos: EosParams) -> np.ndarray:
    gamma, pi = eos_mod.mixture_params(phi, eos)
    e = (p + gamma * pi) / ((gamma - 1.0) * rho)
    a_rho = a * rho
    return np.column_stack([a_rho, a_rho * u, a_rho * (e + 0.5 * u * u), a_rho * phi, np.broadcast_to(a, np.shape(rho))])
