"""Analytic epsilon sweep: negative eigenvalue of H and C(2) - C(1).

Writes one CSV per flip fidelity with the columns needed to plot the
dynamical-matrix eigenvalue and the concurrence difference against epsilon.

    python3 scripts/eigenvalue_concurrence_sweep.py --out-dir results/
"""

import argparse
from pathlib import Path

from nmcollide.config import SweepConfig, fmt, parse_grid
from nmcollide.sweep import run_sweep, to_csv


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--grid", default="0:0.5:0.005", help="epsilon grid start:stop:step")
    p.add_argument("--fidelities", default="0.97,1.0", help="comma separated flip fidelities")
    p.add_argument("--out-dir", type=Path, default=Path("results"))
    args = p.parse_args()

    args.out_dir.mkdir(parents=True, exist_ok=True)
    for F in (float(f) for f in args.fidelities.split(",")):
        config = SweepConfig(epsilon_grid=parse_grid(args.grid), fidelity=F)
        rows = run_sweep(config)
        path = args.out_dir / f"sweep_F{fmt(F)}.csv"
        path.write_text(to_csv(rows, config))
        first = next((r.epsilon for r in rows if r.C_diff > 0), None)
        print(f"F={fmt(F)}: {len(rows)} rows -> {path}; first eps with C(2) > C(1): {first}")


if __name__ == "__main__":
    main()
