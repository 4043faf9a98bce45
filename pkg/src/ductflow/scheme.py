"""Time marching: moving-interface finite-volume update followed by a Glimm remap.

One step is

1. interface solves (same-fluid interfaces fixed, two-fluid ones moving at u*),
2. CFL time step, capped so that a moving interface travels at most half a cell,
3. ALE update on the moved mesh, with the correction for a standing wave swept
   into a cell by a moving interface,
4. random-choice projection back to the fixed grid driven by one (5, 3)
   van der Corput number per step; a state moved onto a different
   cross-section is carried there by stationary transport.

Cells are stored as an ``(N, 5)`` array of conservative variables
``(A rho, A rho u, A rho E, A rho phi, A)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import eos as eos_mod
from .eos import EosParams
from .errors import DuctflowError, InadmissibleStateError, TimeStepError
from .linear_riemann import LAGRANGE, physical_flux, solve_interface, stationary_transport, vfroe_primitive_zero
from .states import ConservativeState, PrimitiveState, cons_to_prim, cons_to_prim_arrays, prim_to_cons


@dataclass(frozen=True)
class Mesh:
    edges: np.ndarray
    areas: np.ndarray

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float)
        areas = np.asarray(self.areas, dtype=float)
        if edges.ndim != 1 or edges.size < 3:
            raise ValueError("need at least two cells")
        if np.any(np.diff(edges) <= 0.0):
            raise ValueError("mesh edges must be strictly increasing")
        if areas.shape != (edges.size - 1,) or np.any(areas <= 0.0):
            raise ValueError("one positive area per cell required")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "areas", areas)

    @classmethod
    def uniform(cls, x_min: float, x_max: float, n_cells: int, areas) -> Mesh:
        edges = np.linspace(x_min, x_max, n_cells + 1)
        return cls(edges, np.broadcast_to(np.asarray(areas, dtype=float), (n_cells,)).copy())

    @property
    def n_cells(self) -> int:
        return self.areas.size

    @property
    def cell_sizes(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])


@dataclass
class SimulationState:
    time: float
    step_index: int
    cells: np.ndarray
    omega_index: int = 1

    def cell(self, i: int) -> ConservativeState:
        return ConservativeState(*(float(x) for x in self.cells[i]))


@dataclass
class StepReport:
    dt: float
    velocities: dict[int, float]
    omega: float
    n_lagrange: int
    conservation_defect: np.ndarray
    double_moving_cells: list[int] = field(default_factory=list)
    remap_fallbacks: int = 0


@dataclass
class InterfaceFluxes:
    """Per-interface arrays for interfaces ``0..N`` (interface ``j`` is the left edge of cell ``j``)."""

    v: np.ndarray
    flux_minus: np.ndarray
    flux_plus: np.ndarray
    flux_zero_minus: np.ndarray
    flux_zero_plus: np.ndarray
    kinds: dict[int, str]


def van_der_corput(n: int, base: int = 5, scramble: int = 3) -> float:
    """Scrambled radical inverse: base-``base`` digits of ``n`` mapped by ``d -> scramble * d mod base``.

    >>> van_der_corput(1), van_der_corput(2), van_der_corput(5)
    (0.6, 0.2, 0.12)
    """
    if n < 1:
        raise ValueError("van der Corput index starts at 1")
    num, den = 0, 1
    while n:
        n, d = divmod(n, base)
        num = num * base + (scramble * d) % base
        den *= base
    return num / den


def _primitive_columns(cells, eos):
    try:
        return cons_to_prim_arrays(cells, eos)
    except InadmissibleStateError:
        raise
    except DuctflowError as exc:
        raise InadmissibleStateError(str(exc)) from None


def interface_fluxes(cells: np.ndarray, eos: EosParams) -> InterfaceFluxes:
    """Solve all ``N + 1`` interfaces; boundaries are transmissive (ghost = copy of the edge cell)."""
    rho, u, p, phi, a = _primitive_columns(cells, eos)
    ext = [np.concatenate(([q[0]], q, [q[-1]])) for q in (rho, u, p, phi, a)]
    left = [q[:-1] for q in ext]
    right = [q[1:] for q in ext]
    n_if = left[0].size

    srho, su, sp, sphi = vfroe_primitive_zero(*left[:4], *right[:4], eos)
    _, pi = eos_mod.mixture_params(sphi, eos)
    special = (left[3] != right[3]) | (left[4] != right[4])
    bad = np.flatnonzero(~special & ~((srho > 0.0) & (sp + pi > 0.0)))
    if bad.size:
        raise InadmissibleStateError("linearized interface state not admissible", field="interface", index=int(bad[0]))
    # two-fluid interfaces are solved below; keep their placeholder state admissible
    srho, su, sp, sphi = (np.where(special, q, v) for q, v in zip(left[:4], (srho, su, sp, sphi)))
    flux = physical_flux(srho, su, sp, sphi, left[4], eos)
    fm = flux
    fp = flux.copy()
    f0m = fm
    f0p = fp
    v = np.zeros(n_if)
    kinds = {}
    for j in np.flatnonzero(special):
        yl = PrimitiveState(*(float(q[j]) for q in left))
        yr = PrimitiveState(*(float(q[j]) for q in right))
        try:
            sol = solve_interface(yl, yr, eos)
        except DuctflowError as exc:
            raise type(exc)(f"interface {j}: {exc}") from exc
        if f0m is fm:
            f0m, f0p = fm.copy(), fp.copy()
        v[j] = sol.v
        fm[j], fp[j] = sol.flux_minus, sol.flux_plus
        f0m[j], f0p[j] = sol.flux_zero_minus, sol.flux_zero_plus
        kinds[int(j)] = sol.kind
    return InterfaceFluxes(v, fm, fp, f0m, f0p, kinds)


def compute_dt(state: SimulationState, mesh: Mesh, cfl: float, eos: EosParams, velocities=None) -> float:
    """``cfl * min dx / max(|u| + c)``, capped so that ``|v| dt <= dx / 2`` on both sides of every moving interface."""
    if not 0.0 < cfl < 1.0:
        raise ValueError(f"cfl must lie in (0, 1), got {cfl}")
    rho, u, p, phi, _ = _primitive_columns(state.cells, eos)
    speed = np.max(np.abs(u) + eos_mod.sound_speed(rho, p, phi, eos))
    if not np.isfinite(speed) or speed <= 0.0:
        raise InadmissibleStateError(f"non-finite or zero wave speed {speed}")
    dx = mesh.cell_sizes
    dt = cfl * dx.min() / speed
    if velocities is not None:
        moving = np.flatnonzero(velocities)
        for j in moving:
            neighbours = dx[max(j - 1, 0) : j + 1]
            dt = min(dt, 0.5 * neighbours.min() / abs(velocities[j]))
    return float(dt)


def ale_update(cells: np.ndarray, mesh: Mesh, dt: float, fluxes: InterfaceFluxes):
    """Moving-mesh update; returns the pre-remap cells and the moved cell sizes."""
    dx = mesh.cell_sizes
    v = fluxes.v
    vl, vr = v[:-1], v[1:]
    dflux = fluxes.flux_minus[1:] - fluxes.flux_plus[:-1]
    static = (vl == 0.0) & (vr == 0.0)
    new = cells - (dt / dx)[:, None] * dflux
    if not static.all():
        dx_new = dx + dt * (vr - vl)
        if np.any(dx_new <= 0.0):
            raise TimeStepError(f"cell {int(np.argmin(dx_new))} collapsed")
        rhs = dx[:, None] * cells - dt * dflux
        # standing wave swept into the cell by a moving edge
        sweep_r = (fluxes.flux_zero_minus[1:] - fluxes.flux_zero_plus[1:]) * (vr > 0.0)[:, None]
        sweep_l = (fluxes.flux_zero_minus[:-1] - fluxes.flux_zero_plus[:-1]) * (vl < 0.0)[:, None]
        rhs -= dt * (sweep_r + sweep_l)
        moving = ~static
        new[moving] = rhs[moving] / dx_new[moving, None]
    else:
        dx_new = dx.copy()
    bad = np.flatnonzero(~(new[:, 0] > 0.0) | ~np.all(np.isfinite(new), axis=1))
    if bad.size:
        raise InadmissibleStateError("updated state not admissible", field="a_rho", index=int(bad[0]))
    return new, dx_new


def conservation_defect(cells, dx, pre_cells, dx_new, dt, fluxes) -> np.ndarray:
    """Relative imbalance of mass, energy and fluid-1 mass over the ALE update (boundary fluxes accounted)."""
    comps = [0, 2, 3]
    before = (dx[:, None] * cells[:, comps]).sum(axis=0)
    after = (dx_new[:, None] * pre_cells[:, comps]).sum(axis=0)
    boundary = dt * (fluxes.flux_minus[-1, comps] - fluxes.flux_plus[0, comps])
    scale = (dx[:, None] * np.abs(cells[:, comps])).sum(axis=0) + np.abs(boundary) + np.finfo(float).tiny
    return np.abs(after - before + boundary) / scale


def glimm_remap(
    pre_cells: np.ndarray, mesh: Mesh, omega: float, dt: float, velocities: np.ndarray, eos: EosParams
) -> tuple[np.ndarray, int]:
    """Random-choice projection onto the fixed grid.

    Cell ``i`` takes its left neighbour if ``omega < dt/dx_i max(v_{i-1/2}, 0)``,
    its right neighbour if ``omega > 1 + dt/dx_i min(v_{i+1/2}, 0)`` and keeps
    its own value otherwise. A picked state whose cross-section differs from
    the fixed geometry is carried to the cell's area by stationary transport;
    if that is impossible (choking) its primitive variables are kept instead.

    Returns the new cells and the number of such primitive fallbacks.
    """
    dx = mesh.cell_sizes
    vl, vr = velocities[:-1], velocities[1:]
    out = pre_cells.copy()
    take_left = omega < dt / dx * np.maximum(vl, 0.0)
    take_right = omega > 1.0 + dt / dx * np.minimum(vr, 0.0)
    idx = np.flatnonzero(take_left)
    out[idx] = pre_cells[idx - 1]
    idx = np.flatnonzero(take_right)
    out[idx] = pre_cells[idx + 1]
    fallbacks = 0
    for i in np.flatnonzero(out[:, 4] != mesh.areas):
        y = cons_to_prim(ConservativeState(*(float(x) for x in out[i])), eos)
        try:
            y = stationary_transport(y, float(mesh.areas[i]), eos)
        except DuctflowError:
            y = y.replace(a=float(mesh.areas[i]))
            fallbacks += 1
        out[i] = prim_to_cons(y, eos).as_array()
    return out, fallbacks


def step(
    state: SimulationState, mesh: Mesh, cfl: float, eos: EosParams, dt_max: float | None = None
) -> tuple[SimulationState, StepReport]:
    """Advance one full cycle; ``dt_max`` clips the step (to land on a final time)."""
    fluxes = interface_fluxes(state.cells, eos)
    dt = compute_dt(state, mesh, cfl, eos, fluxes.v)
    if dt_max is not None:
        dt = min(dt, dt_max)
    pre, dx_new = ale_update(state.cells, mesh, dt, fluxes)
    defect = conservation_defect(state.cells, mesh.cell_sizes, pre, dx_new, dt, fluxes)
    omega = van_der_corput(state.omega_index)
    cells, fallbacks = glimm_remap(pre, mesh, omega, dt, fluxes.v, eos)
    moving = fluxes.v != 0.0
    report = StepReport(
        dt=dt,
        velocities={int(j): float(fluxes.v[j]) for j in np.flatnonzero(moving)},
        omega=omega,
        n_lagrange=sum(1 for k in fluxes.kinds.values() if k == LAGRANGE),
        conservation_defect=defect,
        double_moving_cells=[int(i) for i in np.flatnonzero(moving[:-1] & moving[1:])],
        remap_fallbacks=fallbacks,
    )
    new_state = replace(
        state,
        time=state.time + dt,
        step_index=state.step_index + 1,
        cells=cells,
        omega_index=state.omega_index + 1,
    )
    return new_state, report
