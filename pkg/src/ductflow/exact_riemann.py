"""Exact Riemann solver for two stiffened-gas fluids with an area jump at x = 0.

The fan is made of a left acoustic wave, a standing wave at ``x/t = 0``
(area ``A_L -> A_R``, invariants ``phi, s, Q, H`` continuous), the contact
and a right acoustic wave. The standing wave sits on the side of the contact
that the flow leaves behind: in the left fluid when ``u* > 0`` and in the
right fluid when ``u* < 0``.

Shock and rarefaction relations are the ideal-gas ones written for
``P = p + pi`` (the stiffened gas is an ideal gas in ``P``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import eos as eos_mod
from .eos import EosParams
from .errors import ConvergenceError, DuctflowError, NoRootError, ResonanceError, VacuumError
from .linear_riemann import stationary_transport
from .states import FlowRegime, PrimitiveState, flow_regime

P_RTOL = 1e-12
MAXITER = 200

RAREFACTION = "rarefaction"
SHOCK = "shock"
CONTACT = "contact"
STATIONARY = "stationary"


@dataclass(frozen=True)
class Wave:
    kind: str
    head: float
    tail: float
    # for rarefactions: the state ahead of the fan and the family (-1 left, +1 right)
    outer: PrimitiveState | None = None
    family: int = 0

    @property
    def speed(self) -> float:
        return self.head


@dataclass(frozen=True)
class WaveFan:
    """Waves ordered left to right and the ``len(waves) + 1`` constant states around them."""

    waves: list[Wave]
    states: list[PrimitiveState]
    u_star: float
    p_star: float
    eos: EosParams = field(repr=False)

    @property
    def stationary_side(self) -> str:
        kinds = [w.kind for w in self.waves]
        return "left" if kinds.index(STATIONARY) < kinds.index(CONTACT) else "right"


# -- single-fluid wave curves in P = p + pi --------------------------------------


def _params(y: PrimitiveState, eos):
    gamma, pi = eos_mod.mixture_params(y.phi, eos)
    big_p = y.p + pi
    c = math.sqrt(gamma * big_p / y.rho)
    return gamma, pi, big_p, c


def wave_curve(p, y: PrimitiveState, eos: EosParams):
    """Velocity change function ``f_K(p)`` and the density behind the wave.

    Left wave: ``u = u_L - f_L(p)``; right wave: ``u = u_R + f_R(p)``.
    """
    gamma, pi, big_pk, c = _params(y, eos)
    big_p = p + pi
    if big_p <= 0.0:
        raise VacuumError(f"p + pi = {big_p} behind the wave")
    ratio = big_p / big_pk
    if big_p > big_pk:
        a = 2.0 / ((gamma + 1.0) * y.rho)
        b = (gamma - 1.0) / (gamma + 1.0) * big_pk
        f = (big_p - big_pk) * math.sqrt(a / (big_p + b))
        mu = (gamma - 1.0) / (gamma + 1.0)
        rho = y.rho * (ratio + mu) / (mu * ratio + 1.0)
    else:
        f = 2.0 * c / (gamma - 1.0) * (ratio ** ((gamma - 1.0) / (2.0 * gamma)) - 1.0)
        rho = y.rho * ratio ** (1.0 / gamma)
    return f, rho


def _acoustic_wave(y_out: PrimitiveState, y_in: PrimitiveState, family: int, eos) -> Wave:
    """Wave between the outer state and the state behind it (on the contact side)."""
    gamma, _, big_pk, c = _params(y_out, eos)
    _, _, big_p, c_in = _params(y_in, eos)
    if big_p > big_pk:
        s = y_out.u + family * c * math.sqrt((gamma + 1.0) / (2.0 * gamma) * big_p / big_pk + (gamma - 1.0) / (2.0 * gamma))
        return Wave(SHOCK, s, s, family=family)
    head = y_out.u + family * c
    tail = y_in.u + family * c_in
    if family < 0:
        return Wave(RAREFACTION, head, tail, outer=y_out, family=family)
    return Wave(RAREFACTION, tail, head, outer=y_out, family=family)


def _rarefaction_state(wave: Wave, xi: float, eos) -> PrimitiveState:
    y = wave.outer
    gamma, pi, big_pk, ck = _params(y, eos)
    g1 = gamma - 1.0
    if wave.family < 0:
        u = 2.0 / (gamma + 1.0) * (ck + 0.5 * g1 * y.u + xi)
        c = 2.0 / (gamma + 1.0) * (ck + 0.5 * g1 * (y.u - xi))
    else:
        u = 2.0 / (gamma + 1.0) * (-ck + 0.5 * g1 * y.u + xi)
        c = 2.0 / (gamma + 1.0) * (ck - 0.5 * g1 * (y.u - xi))
    rho = y.rho * (c / ck) ** (2.0 / g1)
    big_p = big_pk * (c / ck) ** (2.0 * gamma / g1)
    return PrimitiveState(rho, u, big_p - pi, y.phi, y.a)


# -- matching -------------------------------------------------------------------------


def _subsonic(y, eos):
    return flow_regime(y, eos) is FlowRegime.SUBSONIC


def _branch_left(y_l, y_r, eos):
    """Standing wave in the left fluid. Unknown: pressure behind the left wave."""

    def states(p1):
        f_l, rho1 = wave_curve(p1, y_l, eos)
        y1 = PrimitiveState(rho1, y_l.u - f_l, p1, y_l.phi, y_l.a)
        if not _subsonic(y1, eos):
            raise NoRootError("supersonic state at the standing wave")
        y2 = stationary_transport(y1, y_r.a, eos, FlowRegime.SUBSONIC)
        f_r, rho3 = wave_curve(y2.p, y_r, eos)
        return y1, y2, f_r, rho3

    def residual(p1):
        _, y2, f_r, _ = states(p1)
        return y2.u - (y_r.u + f_r)

    return states, residual, y_l


def _branch_right(y_l, y_r, eos):
    """Standing wave in the right fluid. Unknown: pressure behind the right wave."""

    def states(p3):
        f_r, rho3 = wave_curve(p3, y_r, eos)
        y3 = PrimitiveState(rho3, y_r.u + f_r, p3, y_r.phi, y_r.a)
        if not _subsonic(y3, eos):
            raise NoRootError("supersonic state at the standing wave")
        y2 = stationary_transport(y3, y_l.a, eos, FlowRegime.SUBSONIC)
        f_l, rho1 = wave_curve(y2.p, y_l, eos)
        return y3, y2, f_l, rho1

    def residual(p3):
        _, y2, f_l, _ = states(p3)
        return (y_l.u - f_l) - y2.u

    return states, residual, y_r


def _find_root(residual, y_ref, eos):
    _, pi = eos_mod.mixture_params(y_ref.phi, eos)
    big_ref = y_ref.p + pi
    grid = big_ref * np.logspace(-8, 6, 561) - pi
    prev = None
    for p in grid:
        try:
            g = residual(p)
        except DuctflowError:
            prev = None
            continue
        if prev is not None and (g == 0.0 or (g > 0.0) != (prev[1] > 0.0)):
            lo, hi = prev[0], p
            try:
                root, info = brentq(
                    residual, lo, hi, xtol=1e-300, rtol=P_RTOL * 1e-2, maxiter=MAXITER, full_output=True
                )
            except DuctflowError:
                prev = (p, g)
                continue
            if not info.converged:
                raise ConvergenceError("contact pressure iteration did not converge")
            return root
        prev = (p, g)
    return None


def solve_exact(y_l: PrimitiveState, y_r: PrimitiveState, eos: EosParams) -> WaveFan:
    """Exact solution of the duct Riemann problem with the area jump at ``x = 0``.

    Raises
    ------
    VacuumError
        No intersection of the wave curves at positive ``p + pi``.
    ResonanceError
        No self-consistent placement of the standing wave (it would have to
        sit in a sonic or supersonic region), or both placements fit.
    """
    solutions = []
    for side in ("left", "right"):
        if side == "left":
            states, residual, ref = _branch_left(y_l, y_r, eos)
        else:
            states, residual, ref = _branch_right(y_l, y_r, eos)
        root = _find_root(residual, ref, eos)
        if root is None:
            continue
        if side == "left":
            y1, y2, f_r, rho3 = states(root)
            u_star = y2.u
            y3 = PrimitiveState(rho3, u_star, y2.p, y_r.phi, y_r.a)
            if u_star >= 0.0:
                solutions.append((side, y1, y2, y3))
        else:
            y3, y2, f_l, rho1 = states(root)
            u_star = y2.u
            y1 = PrimitiveState(rho1, u_star, y2.p, y_l.phi, y_l.a)
            if u_star <= 0.0:
                solutions.append((side, y1, y2, y3))

    if not solutions:
        raise VacuumError("no self-consistent contact state found")
    if len(solutions) == 2:
        # a contact exactly at rest satisfies both placements; otherwise ambiguous
        u_a, u_b = solutions[0][2].u, solutions[1][2].u
        if max(abs(u_a), abs(u_b)) > 1e-12 * max(1.0, abs(y_l.u), abs(y_r.u)):
            raise ResonanceError("both standing-wave placements are self-consistent")
        solutions = solutions[:1]
    side, y1, y2, y3 = solutions[0]

    if side == "left":
        w_left = _acoustic_wave(y_l, y1, -1, eos)
        w_right = _acoustic_wave(y_r, y3, +1, eos)
        middle = [Wave(STATIONARY, 0.0, 0.0), Wave(CONTACT, y2.u, y2.u)]
    else:
        w_left = _acoustic_wave(y_l, y1, -1, eos)
        w_right = _acoustic_wave(y_r, y3, +1, eos)
        middle = [Wave(CONTACT, y2.u, y2.u), Wave(STATIONARY, 0.0, 0.0)]
    if not w_left.tail < 0.0 < w_right.head:
        raise ResonanceError(
            f"acoustic waves cross the standing wave (left tail {w_left.tail}, right head {w_right.head})"
        )
    waves = [w_left, *middle, w_right]
    fan = WaveFan(waves, [y_l, y1, y2, y3, y_r], y2.u, y2.p, eos)
    return fan


def sample(fan: WaveFan, xi: float, side: int = -1) -> PrimitiveState:
    """State at ``x/t = xi``; on a discontinuity ``side`` picks the left (-1) or right (+1) limit."""
    for i, wave in enumerate(fan.waves):
        if xi < wave.head or (xi == wave.head and side < 0 and wave.kind != RAREFACTION):
            return fan.states[i]
        if wave.kind == RAREFACTION and xi <= wave.tail:
            return _rarefaction_state(wave, xi, fan.eos)
    return fan.states[-1]
