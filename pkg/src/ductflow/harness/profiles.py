"""Profile CSV files and error norms between two profiles."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import eos as eos_mod
from ..eos import EosParams

COLUMNS = ("x", "rho", "u", "p", "phi", "a", "e", "s", "mach")
GRID_TOL = 1e-12


class GridMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class Profile:
    """Column arrays of a profile file, in the fixed column order."""

    data: dict[str, np.ndarray]

    def __getitem__(self, name) -> np.ndarray:
        return self.data[name]

    def __len__(self) -> int:
        return self.data["x"].size

    @classmethod
    def from_primitives(cls, x, rho, u, p, phi, a, eos: EosParams) -> Profile:
        rho, u, p, phi, a = (np.asarray(q, dtype=float) for q in (rho, u, p, phi, a))
        c = eos_mod.sound_speed(rho, p, phi, eos)
        cols = {
            "x": np.asarray(x, dtype=float),
            "rho": rho,
            "u": u,
            "p": p,
            "phi": phi,
            "a": np.broadcast_to(a, rho.shape).astype(float),
            "e": eos_mod.internal_energy(rho, p, phi, eos),
            "s": eos_mod.entropy(rho, p, phi, eos),
            "mach": u / c,
        }
        return cls(cols)


def format_profile(profile: Profile) -> str:
    buf = io.StringIO()
    buf.write(",".join(COLUMNS) + "\n")
    table = np.column_stack([profile[c] for c in COLUMNS])
    for row in table:
        buf.write(",".join(f"{v:.17g}" for v in row) + "\n")
    return buf.getvalue()


def write_profile(profile: Profile, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(format_profile(profile))
    return path


def read_profile(path) -> Profile:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != COLUMNS:
        raise ValueError(f"{path}: header must be {','.join(COLUMNS)}")
    table = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float).reshape(-1, len(COLUMNS))
    return Profile({c: table[:, k] for k, c in enumerate(COLUMNS)})


def _norms(a: np.ndarray, b: np.ndarray) -> dict:
    # normalised by the mean magnitude of both profiles so the report is symmetric
    d = np.abs(a - b)
    tiny = np.finfo(float).tiny
    l1 = d.sum() / max(0.5 * (np.abs(a).sum() + np.abs(b).sum()), tiny)
    l2 = np.sqrt((d * d).sum()) / max(np.sqrt(0.5 * ((a * a).sum() + (b * b).sum())), tiny)
    linf = d.max() / max(np.abs(a).max(), np.abs(b).max(), tiny)
    return {"l1": float(l1), "l2": float(l2), "linf": float(linf)}


def mixed_cells(phi: np.ndarray, tol: float = eos_mod.PHI_CLAMP_TOL) -> int:
    """Number of cells whose fraction lies strictly between the pure values."""
    return int(np.count_nonzero((phi > tol) & (phi < 1.0 - tol)))


def compare(profile: Profile, reference: Profile) -> dict:
    """Relative L1, L2 and max-norm errors per column plus the fraction smearing counts.

    Raises
    ------
    GridMismatchError
        If the abscissae differ by more than ``GRID_TOL``.
    """
    if len(profile) != len(reference):
        raise GridMismatchError(f"row counts differ: {len(profile)} vs {len(reference)}")
    dx = np.abs(profile["x"] - reference["x"])
    if dx.size and dx.max() > GRID_TOL:
        i = int(np.argmax(dx))
        raise GridMismatchError(f"abscissae differ at row {i}: {profile['x'][i]!r} vs {reference['x'][i]!r}")
    errors = {c: _norms(profile[c], reference[c]) for c in COLUMNS[1:]}
    return {
        "n_rows": len(profile),
        "errors": errors,
        "phi_mixed_cells": {"profile": mixed_cells(profile["phi"]), "reference": mixed_cells(reference["phi"])},
    }


def compare_files(path_a, path_b) -> dict:
    return compare(read_profile(path_a), read_profile(path_b))


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)


def report_text(report: dict) -> str:
    lines = [f"{'column':>6}  {'L1':>11}  {'L2':>11}  {'Linf':>11}"]
    for col, e in report["errors"].items():
        lines.append(f"{col:>6}  {e['l1']:11.4e}  {e['l2']:11.4e}  {e['linf']:11.4e}")
    mixed = report["phi_mixed_cells"]
    lines.append(f"mixed phi cells: {mixed['profile']} (reference {mixed['reference']})")
    return "\n".join(lines)
