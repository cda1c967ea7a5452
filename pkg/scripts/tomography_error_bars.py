"""Monte Carlo concurrence error bars versus counts per setting.

For the collision-model states at several epsilon, prints the mean and
relative standard deviation of the reconstructed concurrence for each N.

    python3 scripts/tomography_error_bars.py --counts 1000,10000,100000 --reps 200
"""

import argparse

from nmcollide import channels as ch
from nmcollide.config import DEFAULT_FIDELITY
from nmcollide.states import bell_state, concurrence, visibility_for_concurrence
from nmcollide.tomo import error_bars


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--eps", default="0,0.05,0.1,0.15", help="comma separated epsilon values")
    p.add_argument("--counts", default="1000,10000,100000")
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--fidelity", type=float, default=DEFAULT_FIDELITY)
    p.add_argument("--c0", type=float, default=0.975, help="concurrence of the input state")
    p.add_argument("--seed", type=int, default=2024)
    args = p.parse_args()

    rho0 = bell_state(0, visibility_for_concurrence(args.c0))
    print("eps,collisions,C_true,N,C_mean,std,rel_std")
    for eps in (float(e) for e in args.eps.split(",")):
        t = ch.collision_table(eps)
        for n, channel in ((1, ch.channel_after_one(t, args.fidelity)), (2, ch.channel_after_two(t, args.fidelity))):
            state = ch.apply_to_system(rho0, channel)
            c = concurrence(state)
            for N in (int(x) for x in args.counts.split(",")):
                eb = error_bars(state, N, args.reps, args.seed)
                rel = eb["std"] / eb["mean"] if eb["mean"] > 0 else float("nan")
                print(f"{eps:g},{n},{c:.6g},{N},{eb['mean']:.6g},{eb['std']:.4g},{rel:.4g}")


if __name__ == "__main__":
    main()
