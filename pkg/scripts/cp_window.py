"""Small-epsilon window in which the intermediate map stays completely positive.

With imperfect flips (F < 1) the closed-form eigenvalue lambda2 changes sign
at eps* = 2(1 - F) / (11 F^2 - 14 F + 7); below eps* the intermediate map is
CP.  This script prints eps* next to the first negative lambda_min found by
bisection on the simulated pipeline.

    python3 scripts/cp_window.py --fidelities 0.9,0.95,0.97,0.99,1
"""

import argparse

from nmcollide import channels as ch
from nmcollide.nmk import dynamical_matrix, intermediate_map


def lambda_min(eps, F):
    t = ch.collision_table(eps)
    m = intermediate_map(ch.bloch_map(ch.channel_after_two(t, F)), ch.bloch_map(ch.channel_after_one(t, F)))
    return dynamical_matrix(m).lambda_min


def sign_change(F, lo=1e-6, hi=0.2, steps=60):
    if lambda_min(lo, F) < 0:
        return 0.0
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if lambda_min(mid, F) >= 0 else (lo, mid)
    return 0.5 * (lo + hi)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--fidelities", default="0.9,0.95,0.97,0.99,1.0")
    args = p.parse_args()
    print("F,eps_star_closed_form,eps_star_pipeline,lambda_min_at_0.01")
    for F in (float(f) for f in args.fidelities.split(",")):
        closed = 2 * (1 - F) / (11 * F**2 - 14 * F + 7)
        print(f"{F:g},{closed:.10g},{sign_change(F):.10g},{lambda_min(0.01, F):.6g}")


if __name__ == "__main__":
    main()
