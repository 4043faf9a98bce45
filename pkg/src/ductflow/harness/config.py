"""Run configuration files.

INI-style text read with :mod:`configparser`; sub-sections use dotted names::

    [domain]            x_min, x_max, n_cells, boundary (= transmissive)
    [time]              cfl, t_final, seed_offset (default 1)
    [eos]               gamma1, pi1, gamma2, pi2
    [initial]           type = riemann | stationary
      riemann:          x0 plus sections [initial.left] and [initial.right]
                        with rho, u, p, phi, a
      stationary:       phi, s, q, h_total, regime (subsonic | supersonic),
                        or a section [initial.reference] (rho, u, p, phi)
                        whose invariants are used instead
    [area]              stationary only: profile = piecewise with
                        breaks = x1, x2, ... and values = a0, a1, ...;
                        or profile = table with x = ... and a = ... (linear
                        interpolation at cell centres)
    [output]            dir (optional)

Every violation found is reported at once, keyed by ``section.key``.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ..eos import EosParams
from ..errors import ConfigError, DuctflowError
from ..states import FlowRegime, PrimitiveState, StationaryInvariants, prim_to_stationary


@dataclass(frozen=True)
class RiemannIC:
    x0: float
    left: PrimitiveState
    right: PrimitiveState


@dataclass(frozen=True)
class StationaryIC:
    phi: float
    s: float
    q: float
    h_total: float
    regime: FlowRegime
    area_x: tuple[float, ...]
    area_values: tuple[float, ...]
    area_kind: str = "piecewise"

    def area_at(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.area_kind == "table":
            return np.interp(x, self.area_x, self.area_values)
        return np.asarray(self.area_values, dtype=float)[np.searchsorted(self.area_x, x, side="right")]

    def invariants(self, a: float) -> StationaryInvariants:
        return StationaryInvariants(a, self.phi, self.s, self.q, self.h_total)


@dataclass(frozen=True)
class RunConfig:
    x_min: float
    x_max: float
    n_cells: int
    cfl: float
    t_final: float
    eos: EosParams
    initial_condition: RiemannIC | StationaryIC
    seed_offset: int = 1
    boundary: str = "transmissive"
    output_dir: Path | None = None
    source: Path | None = field(default=None, compare=False)

    def with_cells(self, n_cells: int) -> RunConfig:
        return replace(self, n_cells=n_cells)

    def with_time(self, t_final: float) -> RunConfig:
        return replace(self, t_final=t_final)


class _Reader:
    """Pulls typed values out of a ConfigParser and records every problem."""

    def __init__(self, parser):
        self.parser = parser
        self.problems: list[str] = []

    def get(self, section, key, kind=float, default=None, required=True):
        path = f"{section}.{key}"
        if not self.parser.has_option(section, key):
            if required and default is None:
                self.problems.append(f"{path}: missing")
            return default
        raw = self.parser.get(section, key).strip()
        try:
            if kind is float:
                value = float(raw)
                if not math.isfinite(value):
                    raise ValueError("not finite")
                return value
            if kind is int:
                return int(raw)
            if kind == "floats":
                return tuple(float(t) for t in raw.replace(",", " ").split())
            return raw
        except ValueError:
            self.problems.append(f"{path}: cannot parse {raw!r} as {getattr(kind, '__name__', kind)}")
            return default

    def check(self, ok, message):
        if not ok:
            self.problems.append(message)


def _state(r: _Reader, section: str, with_area=True):
    vals = {k: r.get(section, k) for k in ("rho", "u", "p", "phi")}
    vals["a"] = r.get(section, "a") if with_area else 1.0
    if any(v is None for v in vals.values()):
        return None
    try:
        return PrimitiveState(**vals)
    except DuctflowError as exc:
        r.problems.append(f"{section}.{getattr(exc, 'field', '') or 'state'}: {exc}")
        return None


def parse_config(text: str, source: Path | None = None) -> RunConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text, source=str(source or "<config>"))
    except configparser.Error as exc:
        raise ConfigError(f"parse error: {exc}") from None
    r = _Reader(parser)

    x_min = r.get("domain", "x_min")
    x_max = r.get("domain", "x_max")
    n_cells = r.get("domain", "n_cells", int)
    boundary = r.get("domain", "boundary", str, default="transmissive")
    cfl = r.get("time", "cfl")
    t_final = r.get("time", "t_final")
    seed_offset = r.get("time", "seed_offset", int, default=1)

    if x_min is not None and x_max is not None:
        r.check(x_min < x_max, "domain.x_max: must exceed domain.x_min")
    if n_cells is not None:
        r.check(n_cells >= 2, "domain.n_cells: must be >= 2")
    r.check(boundary == "transmissive", f"domain.boundary: only 'transmissive' is supported, got {boundary!r}")
    if cfl is not None:
        r.check(0.0 < cfl < 1.0, f"time.cfl: must lie in (0, 1), got {cfl}")
    if t_final is not None:
        r.check(t_final >= 0.0, "time.t_final: must be >= 0")
    if seed_offset is not None:
        r.check(seed_offset >= 1, "time.seed_offset: must be >= 1")

    eos_vals = {k: r.get("eos", k) for k in ("gamma1", "pi1", "gamma2", "pi2")}
    eos = None
    if all(v is not None for v in eos_vals.values()):
        try:
            eos = EosParams(**eos_vals)
        except DuctflowError as exc:
            r.problems.append(f"eos: {exc}")

    kind = r.get("initial", "type", str)
    ic = None
    if kind == "riemann":
        x0 = r.get("initial", "x0")
        left = _state(r, "initial.left")
        right = _state(r, "initial.right")
        if x0 is not None and x_min is not None and x_max is not None:
            r.check(x_min < x0 < x_max, "initial.x0: must lie inside the domain")
        if None not in (x0, left, right):
            ic = RiemannIC(x0, left, right)
    elif kind == "stationary":
        ic = _stationary(r, eos)
    elif kind is not None:
        r.problems.append(f"initial.type: expected 'riemann' or 'stationary', got {kind!r}")

    out = r.get("output", "dir", str, required=False)
    if r.problems:
        raise ConfigError(r.problems)
    return RunConfig(
        x_min, x_max, n_cells, cfl, t_final, eos, ic, seed_offset, boundary,
        Path(out) if out else None, source,
    )


def _stationary(r: _Reader, eos):
    regime_raw = r.get("initial", "regime", str, default="subsonic")
    try:
        regime = FlowRegime(regime_raw)
    except ValueError:
        r.problems.append(f"initial.regime: expected 'subsonic' or 'supersonic', got {regime_raw!r}")
        regime = None
    if r.parser.has_section("initial.reference"):
        ref = _state(r, "initial.reference", with_area=False)
        if ref is None or eos is None:
            return None
        try:
            z = prim_to_stationary(ref, eos)
        except DuctflowError as exc:
            r.problems.append(f"initial.reference: {exc}")
            return None
        phi, s, q_per_area, h = z.phi, z.s, z.q, z.h_total
        # the reference state is given per unit area; rescale by the configured reference area
        q = q_per_area * r.get("initial.reference", "a", default=1.0, required=False)
    else:
        phi = r.get("initial", "phi")
        s = r.get("initial", "s")
        q = r.get("initial", "q")
        h = r.get("initial", "h_total")
        if phi is not None:
            r.check(0.0 <= phi <= 1.0, "initial.phi: must lie in [0, 1]")
        if s is not None:
            r.check(s > 0.0, "initial.s: must be positive")
    profile = r.get("area", "profile", str, default="piecewise")
    if profile == "piecewise":
        xs = r.get("area", "breaks", "floats", default=())
        values = r.get("area", "values", "floats")
        if values is not None:
            r.check(len(values) == len(xs) + 1, "area.values: need one more value than area.breaks")
            r.check(all(np.diff(xs) > 0), "area.breaks: must be increasing")
    elif profile == "table":
        xs = r.get("area", "x", "floats")
        values = r.get("area", "a", "floats")
        if xs is not None and values is not None:
            r.check(len(xs) == len(values) and len(xs) >= 2, "area.a: need as many values as area.x (>= 2)")
            r.check(all(np.diff(xs) > 0), "area.x: must be increasing")
    else:
        r.problems.append(f"area.profile: expected 'piecewise' or 'table', got {profile!r}")
        return None
    if values is not None:
        r.check(all(v > 0 for v in values), "area.values: areas must be positive")
    if None in (phi, s, q, h, regime, values, xs):
        return None
    return StationaryIC(phi, s, q, h, regime, tuple(xs), tuple(values), profile)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return parse_config(text, source=path)
