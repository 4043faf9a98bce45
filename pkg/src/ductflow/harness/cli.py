"""Command line interface.

    ductflow run --config FILE [--out DIR] [--plot-script]
    ductflow exact --config FILE --time T [--samples N] [--out FILE]
    ductflow compare A.csv B.csv [--json]
    ductflow wb-check --config FILE [--steps N]

Exit status: 0 success, 1 a check ran and failed, 2 configuration error,
3 numerical error. Diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..errors import ConfigError, DuctflowError
from .config import RiemannIC, load_config
from .driver import emit_exact, run, wb_check
from .profiles import GridMismatchError, compare_files, report_json, report_text, write_profile

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3

PLOT_SCRIPT = '''"""Overlay the computed profiles on the exact solution (density, velocity, pressure)."""

import csv
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = Path(__file__).resolve().parent
LABELS = {"rho": "density", "u": "velocity", "p": "pressure"}


def load(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {k: [float(r[k]) for r in rows] for k in rows[0]}


def main(out_dir=HERE):
    out_dir = Path(out_dir)
    num = load(out_dir / "profile.csv")
    exact_path = out_dir / "exact.csv"
    exact = load(exact_path) if exact_path.exists() else None
    for col, label in LABELS.items():
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(num["x"], num[col], "-", lw=1.0, label="scheme")
        if exact is not None:
            ax.plot(exact["x"], exact[col], ":", color="k", lw=1.2, label="exact")
        ax.set_xlabel("x")
        ax.set_ylabel(label)
        ax.legend()
        fig.tight_layout()
        fig.savefig(out_dir / f"{col}.png", dpi=150)
        plt.close(fig)


if __name__ == "__main__":
    main(*sys.argv[1:])
'''


def _run(args) -> int:
    config = load_config(args.config)
    out = Path(args.out) if args.out else (config.output_dir or Path("out"))
    result = run(config, out_dir=out)
    if args.plot_script:
        if isinstance(config.initial_condition, RiemannIC):
            write_profile(emit_exact(config, result.state.time), out / "exact.csv")
        (out / "plot_profiles.py").write_text(PLOT_SCRIPT)
    s = result.summary
    print(f"{s['steps']} steps to t = {s['t_final']:.6g} in {s['wall_time_s']:.2f} s; profile in {out}")
    return EXIT_OK


def _exact(args) -> int:
    config = load_config(args.config)
    profile = emit_exact(config, args.time, args.samples)
    out = Path(args.out) if args.out else Path("exact.csv")
    write_profile(profile, out)
    print(f"exact profile at t = {args.time} written to {out}")
    return EXIT_OK


def _compare(args) -> int:
    report = compare_files(args.a, args.b)
    print(report_json(report) if args.json else report_text(report))
    return EXIT_OK


def _wb_check(args) -> int:
    report = wb_check(load_config(args.config), steps=args.steps)
    print(json.dumps(report, indent=2))
    return EXIT_OK if report["passed"] else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ductflow", description="Two-fluid duct flow solver")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="integrate a configuration to its final time")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="output directory (default: [output] dir or ./out)")
    p.add_argument("--plot-script", action="store_true", help="also write exact.csv and plot_profiles.py")
    p.set_defaults(func=_run)

    p = sub.add_parser("exact", help="sample the exact solution of a Riemann configuration")
    p.add_argument("--config", required=True)
    p.add_argument("--time", type=float, required=True)
    p.add_argument("--samples", type=int, default=None, help="uniform sample count (default: cell centres)")
    p.add_argument("--out", help="output CSV (default: ./exact.csv)")
    p.set_defaults(func=_exact)

    p = sub.add_parser("compare", help="error norms between two profile CSVs")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_compare)

    p = sub.add_parser("wb-check", help="check that a stationary configuration stays put")
    p.add_argument("--config", required=True)
    p.add_argument("--steps", type=int, default=100)
    p.set_defaults(func=_wb_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return EXIT_CONFIG
    except (DuctflowError, GridMismatchError, FloatingPointError) as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
