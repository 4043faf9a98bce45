"""Rewrite the golden files in this directory from the current build.

Run only after a change has been verified: the files are regression anchors.

    python tests/data/regenerate.py
"""

from pathlib import Path

from ductflow.harness.config import load_config
from ductflow.harness.driver import build_initial_state, emit_exact, march, state_profile
from ductflow.harness.profiles import write_profile

HERE = Path(__file__).resolve().parent
CONFIGS = HERE.parents[1] / "configs"


def main():
    cfg = load_config(CONFIGS / "table1.cfg")
    mesh, state = build_initial_state(cfg)
    state, _ = march(state, mesh, cfg, cfg.eos, n_steps=1)
    write_profile(state_profile(state, mesh, cfg.eos), HERE / "table1_step1.csv")
    write_profile(emit_exact(cfg, cfg.t_final), HERE / "table1_exact_t0.2.csv")


if __name__ == "__main__":
    main()
