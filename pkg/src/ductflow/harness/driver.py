"""Experiment drivers: initial data, time marching to a final time, exact references, well-balance check."""

from __future__ import annotations

import json
import time as wallclock
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..eos import EosParams
from ..errors import DomainError, DuctflowError, InadmissibleStateError
from ..exact_riemann import sample, solve_exact
from ..scheme import Mesh, SimulationState, StepReport, step
from ..states import PrimitiveState, cons_to_prim_arrays, prim_to_cons_arrays, stationary_to_prim
from .config import RiemannIC, RunConfig, StationaryIC
from .profiles import Profile, mixed_cells, write_profile

WB_STEPS = 100
WB_TOL = 1e-10

STEP_LOG_COLUMNS = (
    "step", "time", "dt", "omega", "n_moving", "n_lagrange",
    "defect_mass", "defect_energy", "defect_fraction", "mixed_phi_cells", "remap_fallbacks",
)


@dataclass
class RunResult:
    state: SimulationState
    mesh: Mesh
    profile: Profile
    summary: dict
    step_log: list[tuple] = field(repr=False, default_factory=list)


def build_initial_state(config: RunConfig, eos: EosParams | None = None) -> tuple[Mesh, SimulationState]:
    """Mesh and cell averages at ``t = 0``.

    A Riemann problem splits the cells by the side of ``x0`` their centre lies
    on. A stationary configuration solves every cell from its own area and the
    common invariants, so the discrete data is an exact stationary state; cells
    sharing an area value share bit-identical states.
    """
    eos = eos or config.eos
    ic = config.initial_condition
    edges = np.linspace(config.x_min, config.x_max, config.n_cells + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    if isinstance(ic, RiemannIC):
        left = centers < ic.x0
        cols = [np.where(left, getattr(ic.left, k), getattr(ic.right, k)) for k in ("rho", "u", "p", "phi", "a")]
    elif isinstance(ic, StationaryIC):
        areas = ic.area_at(centers)
        cols = [np.empty_like(centers) for _ in range(5)]
        for a in np.unique(areas):
            sel = areas == a
            try:
                y = stationary_to_prim(ic.invariants(float(a)), ic.regime, eos)
            except DuctflowError as exc:
                first = int(np.flatnonzero(sel)[0])
                raise type(exc)(f"cell {first} (A = {a}): {exc}") from exc
            for k, v in enumerate(y.as_array()):
                cols[k][sel] = v
    else:
        raise TypeError(f"unknown initial condition {ic!r}")
    mesh = Mesh(edges, cols[4])
    cells = prim_to_cons_arrays(*cols, eos)
    return mesh, SimulationState(0.0, 0, cells, config.seed_offset)


def state_profile(state: SimulationState, mesh: Mesh, eos: EosParams) -> Profile:
    rho, u, p, phi, a = cons_to_prim_arrays(state.cells, eos)
    return Profile.from_primitives(mesh.centers, rho, u, p, phi, a, eos)


def _log_row(report: StepReport, state: SimulationState, mixed: int) -> tuple:
    d = report.conservation_defect
    return (
        state.step_index, state.time, report.dt, report.omega, len(report.velocities), report.n_lagrange,
        d[0], d[1], d[2], mixed, report.remap_fallbacks,
    )


def march(state, mesh, config, eos, t_final=None, n_steps=None, callback=None):
    """Advance until ``t_final`` (last step clipped) or for ``n_steps`` steps.

    ``callback(state, report)`` is called after every step. Returns the final
    state and the per-step log rows.
    """
    log = []
    while True:
        if n_steps is not None and state.step_index >= n_steps:
            break
        dt_max = None
        if t_final is not None:
            remaining = t_final - state.time
            if remaining <= 0.0:
                break
            dt_max = remaining
        try:
            new, report = step(state, mesh, config.cfl, eos, dt_max=dt_max)
        except InadmissibleStateError as exc:
            raise InadmissibleStateError(f"step {state.step_index + 1}: {exc}", field=exc.field) from exc
        except DuctflowError as exc:
            raise type(exc)(f"step {state.step_index + 1}: {exc}") from exc
        if t_final is not None and report.dt == dt_max:
            new.time = t_final
        state = new
        log.append(_log_row(report, state, mixed_cells(state.cells[:, 3] / state.cells[:, 0])))
        if callback is not None:
            callback(state, report)
    return state, log


def _summary(config, state, log, wall) -> dict:
    arr = np.array(log, dtype=float).reshape(-1, len(STEP_LOG_COLUMNS))
    return {
        "n_cells": config.n_cells,
        "t_final": state.time,
        "steps": state.step_index,
        "seed_offset": config.seed_offset,
        "boundary": config.boundary,
        "wall_time_s": wall,
        "max_conservation_defect": {
            "mass": float(arr[:, 6].max(initial=0.0)),
            "energy": float(arr[:, 7].max(initial=0.0)),
            "fraction": float(arr[:, 8].max(initial=0.0)),
        },
        "max_mixed_phi_cells": int(arr[:, 9].max(initial=0.0)),
        "remap_fallbacks": int(arr[:, 10].sum()),
    }


def write_step_log(log, path) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(STEP_LOG_COLUMNS) + "\n")
        for row in log:
            fh.write(",".join(f"{v:.17g}" if isinstance(v, float) else str(v) for v in row) + "\n")


def run(config: RunConfig, out_dir=None, callback=None) -> RunResult:
    """Integrate to ``config.t_final``; optionally write ``profile.csv``, ``steps.csv`` and ``summary.json``."""
    eos = config.eos
    mesh, state = build_initial_state(config, eos)
    start = wallclock.perf_counter()
    state, log = march(state, mesh, config, eos, t_final=config.t_final, callback=callback)
    wall = wallclock.perf_counter() - start
    result = RunResult(state, mesh, state_profile(state, mesh, eos), _summary(config, state, log, wall), log)
    if out_dir is not None:
        out = Path(out_dir)
        write_profile(result.profile, out / "profile.csv")
        write_step_log(log, out / "steps.csv")
        (out / "summary.json").write_text(json.dumps(result.summary, indent=2) + "\n")
    return result


def emit_exact(config: RunConfig, t: float, n_samples: int | None = None) -> Profile:
    """Exact solution of a Riemann configuration at time ``t``.

    Sampled at the scheme's cell centres, or at the centres of ``n_samples``
    uniform cells. Points sitting exactly on a discontinuity take its left limit.
    """
    ic = config.initial_condition
    if not isinstance(ic, RiemannIC):
        raise DomainError("exact reference needs a Riemann configuration")
    if t < 0.0:
        raise DomainError(f"time must be >= 0, got {t}")
    n = n_samples or config.n_cells
    edges = np.linspace(config.x_min, config.x_max, n + 1)
    x = 0.5 * (edges[:-1] + edges[1:])
    if t == 0.0:
        states = [ic.left if xi < ic.x0 else ic.right for xi in x]
    else:
        fan = solve_exact(ic.left, ic.right, config.eos)
        states = [sample(fan, (xi - ic.x0) / t) for xi in x]
    cols = np.array([s.as_array() for s in states]).T
    return Profile.from_primitives(x, *cols, config.eos)


def exact_fan(config: RunConfig):
    ic = config.initial_condition
    return solve_exact(ic.left, ic.right, config.eos)


def wb_check(config: RunConfig, steps: int = WB_STEPS, perturb: tuple[int, float] | None = None) -> dict:
    """Run ``steps`` steps from the configured stationary state and measure the drift.

    The deviation of component ``k`` is ``max_i |W_ik(n) - W_ik(0)|`` over the
    largest initial magnitude of that component (of the whole state when the
    component vanishes identically, e.g. momentum at rest). ``perturb =
    (cell, factor)`` scales one cell's density before the run, a negative
    control that must fail.
    """
    if not isinstance(config.initial_condition, StationaryIC):
        raise DomainError("well-balance check needs a stationary configuration")
    eos = config.eos
    mesh, state = build_initial_state(config, eos)
    reference = state.cells.copy()
    if perturb is not None:
        i, factor = perturb
        rho, u, p, phi, a = cons_to_prim_arrays(state.cells, eos)
        y = PrimitiveState(rho[i] * factor, u[i], p[i], phi[i], a[i])
        state.cells[i] = prim_to_cons_arrays(*(np.array([v]) for v in y.as_array()), eos)[0]
    start = wallclock.perf_counter()
    state, log = march(state, mesh, config, eos, n_steps=steps)
    wall = wallclock.perf_counter() - start
    scale = np.abs(reference).max(axis=0)
    scale = np.where(scale > 0.0, scale, np.abs(reference).max())
    deviation = np.abs(state.cells - reference).max(axis=0) / scale
    names = ("a_rho", "a_rho_u", "a_rho_E", "a_rho_phi", "a")
    worst = float(deviation.max())
    return {
        "steps": state.step_index,
        "time": state.time,
        "deviation": dict(zip(names, map(float, deviation))),
        "max_deviation": worst,
        "tolerance": WB_TOL,
        "passed": bool(worst <= WB_TOL),
        "wall_time_s": wall,
    }


def convergence_study(config: RunConfig, resolutions=(500, 2000, 8000), columns=("rho", "u", "p")) -> list[dict]:
    """Relative L1 errors against the exact solution for each resolution."""
    from .profiles import compare

    rows = []
    for n in resolutions:
        cfg = config.with_cells(n)
        result = run(cfg)
        report = compare(result.profile, emit_exact(cfg, cfg.t_final))
        rows.append({"n_cells": n, **{c: report["errors"][c]["l1"] for c in columns}})
    return rows
