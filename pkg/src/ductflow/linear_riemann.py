"""Linearized (VFRoe-type) interface solver and the ALE numerical flux.

Two interface treatments are dispatched on the mass fraction:

* same fluid (``phi_L == phi_R``): fixed interface (``v = 0``), well-balanced.
  The primitive linearization is solved at constant area; an area jump is
  crossed with the exact standing-wave relations (``phi, s, Q, H`` constant),
  so mass, energy and fraction fluxes are continuous across it and discrete
  stationary states are preserved.
* two fluids (``phi_L != phi_R``): Lagrangian interface moving at the contact
  velocity ``u*`` of the primitive linearized problem, flux
  ``(0, A* p*, A* u* p*, 0, -A* u*)``.

Primitive variables are ordered ``(rho, u, p, phi, A)`` and the eigenvalues
``(0, u - c, u, u, u + c)`` keep their index ``k = 0..4`` throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import eos as eos_mod
from .eos import EosParams
from .errors import InadmissibleStateError, ResonanceError
from .states import (
    ConservativeState,
    FlowRegime,
    PrimitiveState,
    StationaryInvariants,
    cons_to_prim,
    flow_regime,
    prim_to_stationary,
    stationary_to_prim,
)

# relative eigenvalue separation below which an area jump is resonant
RESONANCE_TOL = 1e-8

WELL_BALANCED = "well_balanced"
LAGRANGE = "lagrange"


@dataclass(frozen=True)
class QuasiLinearSystem:
    """``dY/dt + C dY/dx = 0`` frozen at ``mean``; column ``k`` of ``eigenvectors`` pairs with ``eigenvalues[k]``."""

    c_matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    mean: PrimitiveState
    sound_speed: float


@dataclass(frozen=True)
class InterfaceSolution:
    """Numerical fluxes at one interface.

    ``flux_minus``/``flux_plus`` are ``F(W_L, W_R, v-)``/``F(W_L, W_R, v+)``
    (ALE fluxes, ``- v W`` included). ``flux_zero_minus``/``flux_zero_plus``
    are the fixed-frame fluxes at ``x/t = 0-``/``0+`` used by the moving-mesh
    corrections; for a well-balanced interface they coincide with the ALE pair.
    For a well-balanced interface ``u_star``/``p_star`` report the sampled
    state on the left of ``x/t = 0``.
    """

    v: float
    flux_minus: np.ndarray
    flux_plus: np.ndarray
    u_star: float
    p_star: float
    kind: str
    flux_zero_minus: np.ndarray
    flux_zero_plus: np.ndarray
    a_star: float | None = None


# -- fluxes --------------------------------------------------------------------


def physical_flux(rho, u, p, phi, a, eos: EosParams) -> np.ndarray:
    """Conservative flux ``F(W(Y))``, written as ``(m, m u + A p, m H, m phi, 0)`` with ``m = A rho u``.

    Works on scalars (returns shape ``(5,)``) or arrays (``(N, 5)``).
    """
    m = a * rho * u
    h = eos_mod.enthalpy(rho, p, phi, eos)
    return _flux_from_invariants(m, h + 0.5 * u * u, phi, u, p, a)


def _flux_from_invariants(q, h_total, phi, u, p, a):
    zero = np.zeros_like(np.asarray(q, dtype=float))
    return np.stack(np.broadcast_arrays(q, q * u + a * p, q * h_total, q * phi, zero), axis=-1).astype(float)


def state_flux(y: PrimitiveState, eos: EosParams) -> np.ndarray:
    return physical_flux(y.rho, y.u, y.p, y.phi, y.a, eos)


def _invariant_flux(z: StationaryInvariants, y: PrimitiveState) -> np.ndarray:
    # mass, energy and fraction fluxes taken from Z itself so they are identical on both sides of a standing wave
    return _flux_from_invariants(z.q, z.h_total, z.phi, y.u, y.p, y.a)


# -- primitive linearization ------------------------------------------------------


def mean_state(y_l: PrimitiveState, y_r: PrimitiveState) -> PrimitiveState:
    return PrimitiveState(
        0.5 * (y_l.rho + y_r.rho),
        0.5 * (y_l.u + y_r.u),
        0.5 * (y_l.p + y_r.p),
        0.5 * (y_l.phi + y_r.phi),
        0.5 * (y_l.a + y_r.a),
    )


def quasilinear_primitive(y_bar: PrimitiveState, eos: EosParams, area_jump: bool = True) -> QuasiLinearSystem:
    """Matrix ``C(Y)`` of the primitive system and its closed-form eigenstructure.

    Rows (chain rule on the duct equations with ``dA/dt = 0``)::

        rho: u d(rho) + rho du + (rho u / A) dA
        u:   u du + dp / rho
        p:   rho c^2 du + u dp + (rho c^2 u / A) dA
        phi: u d(phi)
        A:   0

    Raises
    ------
    ResonanceError
        When ``area_jump`` is set and ``u - c`` or ``u + c`` is within
        ``RESONANCE_TOL * c`` of zero.
    """
    rho, u, p, phi, a = y_bar.rho, y_bar.u, y_bar.p, y_bar.phi, y_bar.a
    c = float(eos_mod.sound_speed(rho, p, phi, eos))
    c2 = c * c
    if area_jump and min(abs(u - c), abs(u + c)) <= RESONANCE_TOL * c:
        raise ResonanceError(f"resonant linearization: u = {u}, c = {c}")
    cm = np.array(
        [
            [u, rho, 0.0, 0.0, rho * u / a],
            [0.0, u, 1.0 / rho, 0.0, 0.0],
            [0.0, rho * c2, u, 0.0, rho * c2 * u / a],
            [0.0, 0.0, 0.0, u, 0.0],
            [0.0, 0.0, 0.0, 0.0, 0.0],
        ]
    )
    d = c2 - u * u
    if d != 0.0:
        r0 = [rho * u * u / (a * d), -c2 * u / (a * d), rho * c2 * u * u / (a * d), 0.0, 1.0]
    else:
        # sonic without an area jump: the A-wave carries nothing, any independent vector will do
        r0 = [0.0, 0.0, 0.0, 0.0, 1.0]
    vecs = np.array(
        [
            r0,
            [rho, -c, rho * c2, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0, 0.0],
            [rho, c, rho * c2, 0.0, 0.0],
        ]
    ).T
    lam = np.array([0.0, u - c, u, u, u + c])
    return QuasiLinearSystem(cm, lam, vecs, y_bar, c)


def decompose(system: QuasiLinearSystem, jump: np.ndarray) -> np.ndarray:
    """Wave strengths ``alpha`` with ``jump = sum_k alpha_k r_k``.

    Uses the closed-form left eigenvectors, so a jump without pressure and
    velocity components yields exactly zero acoustic strengths.
    """
    jump = np.asarray(jump, dtype=float)
    rho, c = system.mean.rho, system.sound_speed
    a0 = jump[4]
    rest = jump - a0 * system.eigenvectors[:, 0] if a0 != 0.0 else jump
    d_rho, d_u, d_p, d_phi = rest[0], rest[1], rest[2], rest[3]
    z = rho * c
    a1 = (d_p - z * d_u) / (2.0 * z * c)
    a4 = (d_p + z * d_u) / (2.0 * z * c)
    a2 = d_rho - d_p / (c * c)
    return np.array([a0, a1, a2, d_phi, a4])


def _sample(y_l: PrimitiveState, system: QuasiLinearSystem, alpha: np.ndarray, crossed) -> PrimitiveState:
    vec = y_l.as_array()
    for k in range(5):
        if crossed[k] and alpha[k] != 0.0:
            vec = vec + alpha[k] * system.eigenvectors[:, k]
    return _make_state(vec)


def _make_state(vec) -> PrimitiveState:
    rho, u, p, phi, a = (float(x) for x in vec)
    # an exact two-fluid contact jump lands on {0, 1}; rounding is clamped
    phi = eos_mod.clamp_phi(phi)
    return PrimitiveState(rho, u, p, phi, a)


def _crossed(lam, xi, side):
    return [(l < xi) if side < 0 else (l <= xi) for l in lam]


def solve_linearized(
    y_l: PrimitiveState, y_r: PrimitiveState, xi: float, eos: EosParams, side: int = -1
) -> PrimitiveState:
    """Self-similar solution of the linearized Riemann problem at ``x/t = xi``.

    The linearization is frozen at the arithmetic mean of ``y_l`` and ``y_r``.
    ``side = -1`` samples ``xi-`` (waves with speed ``== xi`` not yet crossed),
    ``side = +1`` samples ``xi+``.
    """
    area_jump = y_l.a != y_r.a
    system = quasilinear_primitive(mean_state(y_l, y_r), eos, area_jump=area_jump)
    alpha = decompose(system, y_r.as_array() - y_l.as_array())
    return _sample(y_l, system, alpha, _crossed(system.eigenvalues, xi, side))


def vfroe_primitive_zero(rho_l, u_l, p_l, phi_l, rho_r, u_r, p_r, phi_r, eos: EosParams):
    """Constant-area primitive VFRoe state at ``x/t = 0-``, vectorised.

    Returns ``(rho, u, p, phi)`` arrays; used for every interface whose two
    cells share fluid and area.
    """
    rho_m = 0.5 * (rho_l + rho_r)
    u_m = 0.5 * (u_l + u_r)
    p_m = 0.5 * (p_l + p_r)
    c = eos_mod.sound_speed(rho_m, p_m, 0.5 * (phi_l + phi_r), eos)
    z = rho_m * c
    c2 = c * c
    u_star = u_m - 0.5 * (p_r - p_l) / z
    p_star = p_m - 0.5 * z * (u_r - u_l)
    rho_sl = rho_l + (p_star - p_l) / c2
    rho_sr = rho_r + (p_star - p_r) / c2
    left = ~(u_m - c < 0.0)
    right = u_m + c < 0.0
    upwind_l = u_m >= 0.0
    rho = np.where(left, rho_l, np.where(right, rho_r, np.where(upwind_l, rho_sl, rho_sr)))
    u = np.where(left, u_l, np.where(right, u_r, u_star))
    p = np.where(left, p_l, np.where(right, p_r, p_star))
    phi = np.where(left | (~right & upwind_l), phi_l, phi_r)
    return rho, u, p, phi


# -- stationary wave -------------------------------------------------------------


def stationary_transport(
    y: PrimitiveState, a_to: float, eos: EosParams, regime: FlowRegime | None = None
) -> PrimitiveState:
    """Carry ``y`` across a standing area jump to area ``a_to``.

    ``(phi, s, Q, H)`` are preserved and so is the flow regime of ``y``
    unless ``regime`` overrides it. Raises NoRootError when the new area
    would choke the flow.
    """
    if a_to == y.a:
        return y
    if regime is None:
        regime = flow_regime(y, eos)
    z = prim_to_stationary(y, eos)
    z = StationaryInvariants(a_to, z.phi, z.s, z.q, z.h_total)
    return stationary_to_prim(z, regime, eos)


def _check_star(y_vec, eos, what):
    rho, p, phi = y_vec[0], y_vec[2], y_vec[3]
    _, pi = eos_mod.mixture_params(eos_mod.clamp_phi(phi), eos)
    if not (rho > 0.0 and p + pi > 0.0):
        raise InadmissibleStateError(f"linearized {what} state not admissible (rho={rho}, p={p})", field=what)


# -- interface dispatch -------------------------------------------------------------


def _well_balanced_constant_area(y_l, y_r, eos) -> InterfaceSolution:
    y = _vfroe_state(y_l, y_r, eos)
    f = state_flux(y, eos)
    return InterfaceSolution(0.0, f, f, y.u, y.p, WELL_BALANCED, f, f)


def _well_balanced_area_jump(y_l, y_r, eos) -> InterfaceSolution:
    """Constant-area solve on the narrow side, standing wave crossed exactly.

    The wide-side cell is transported down to the narrow area, the primitive
    VFRoe state at ``x/t = 0`` is sampled there and carried back up to the
    wide area with the same ``(phi, s, Q, H)``. Widening never chokes a
    subsonic state, and sharing the invariants makes the mass, energy and
    fraction fluxes identical on both sides.
    """
    if y_r.a < y_l.a:
        y_in = stationary_transport(y_l, y_r.a, eos)
        narrow = _vfroe_state(y_in, y_r, eos)
        right = narrow
        left = stationary_transport(narrow, y_l.a, eos)
        z = prim_to_stationary(narrow, eos)
    else:
        y_in = stationary_transport(y_r, y_l.a, eos)
        narrow = _vfroe_state(y_l, y_in, eos)
        left = narrow
        right = stationary_transport(narrow, y_r.a, eos)
        z = prim_to_stationary(narrow, eos)
    f_minus = _invariant_flux(z, left)
    f_plus = _invariant_flux(z, right)
    return InterfaceSolution(0.0, f_minus, f_plus, left.u, left.p, WELL_BALANCED, f_minus, f_plus)


def _vfroe_state(y_l, y_r, eos) -> PrimitiveState:
    rho, u, p, phi = vfroe_primitive_zero(y_l.rho, y_l.u, y_l.p, y_l.phi, y_r.rho, y_r.u, y_r.p, y_r.phi, eos)
    _check_star((rho, u, p, phi), eos, "interface")
    return PrimitiveState(float(rho), float(u), float(p), float(phi), y_l.a)


def _lagrange(y_l, y_r, eos) -> InterfaceSolution:
    area_jump = y_l.a != y_r.a
    system = quasilinear_primitive(mean_state(y_l, y_r), eos, area_jump=area_jump)
    alpha = decompose(system, y_r.as_array() - y_l.as_array())
    lam = system.eigenvalues
    ubar = lam[2]
    # only u and p are read at the contact, so the sample need not be an admissible state
    crossed = _crossed(lam, ubar, -1)
    contact_side = y_l.as_array() + sum(alpha[k] * system.eigenvectors[:, k] for k in range(5) if crossed[k])
    u_star, p_star = float(contact_side[1]), float(contact_side[2])
    v = u_star
    a_star = y_l.a if v < 0.0 else y_r.a
    flux = np.array([0.0, a_star * p_star, a_star * u_star * p_star, 0.0, -a_star * u_star])

    if v > 0.0 and area_jump:
        # standing wave sits in the left fluid: anchor on the state behind the left acoustic wave
        anchor = y_l.as_array()
        if lam[1] < 0.0:
            anchor = anchor + alpha[1] * system.eigenvectors[:, 1]
        _check_star(anchor, eos, "left anchor")
        y0m = _make_state(anchor)
        y0p = stationary_transport(y0m, y_r.a, eos)
        z = prim_to_stationary(y0m, eos)
        f0m, f0p = _invariant_flux(z, y0m), _invariant_flux(z, y0p)
    elif v < 0.0 and area_jump:
        anchor = y_r.as_array()
        if lam[4] > 0.0:
            anchor = anchor - alpha[4] * system.eigenvectors[:, 4]
        _check_star(anchor, eos, "right anchor")
        y0p = _make_state(anchor)
        y0m = stationary_transport(y0p, y_l.a, eos)
        z = prim_to_stationary(y0p, eos)
        f0m, f0p = _invariant_flux(z, y0m), _invariant_flux(z, y0p)
    else:
        # no standing wave to sweep: the moving-mesh correction vanishes
        f0m = f0p = flux
    return InterfaceSolution(v, flux, flux, u_star, p_star, LAGRANGE, f0m, f0p, a_star)


def solve_interface(y_l: PrimitiveState, y_r: PrimitiveState, eos: EosParams) -> InterfaceSolution:
    """Interface dispatch on primitive states (see module docstring)."""
    if y_l.phi != y_r.phi:
        return _lagrange(y_l, y_r, eos)
    if y_l.a == y_r.a:
        return _well_balanced_constant_area(y_l, y_r, eos)
    return _well_balanced_area_jump(y_l, y_r, eos)


def interface_solver(w_l: ConservativeState, w_r: ConservativeState, eos: EosParams) -> InterfaceSolution:
    return solve_interface(cons_to_prim(w_l, eos), cons_to_prim(w_r, eos), eos)
