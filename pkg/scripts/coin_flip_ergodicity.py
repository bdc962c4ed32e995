"""Repeated multiplicative coin flip: ensemble average versus time average.

Prints the ensemble mean, median and analytic expectation of capital at a few
checkpoint rounds, the simulated time-average growth rate, and how often the
round-10 ensemble mean lands within a relative band of its expectation across
many seeds.

    python scripts/coin_flip_ergodicity.py --rounds 10000 --trials 1000 --seed 42
"""
import argparse
import math

import numpy as np

from capgames import CapitalGame, MixedStrategyProfile
from capgames.simulate import SimulationConfig, run


def coin_flip(dynamics):
    return CapitalGame((2,), ([150.0, 60.0],), (100.0,), (dynamics,))


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--rounds", type=int, default=10_000)
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--dynamics", default="multiplicative")
    ap.add_argument("--band", type=float, default=0.05, help="relative band for the round-10 ensemble mean")
    ap.add_argument("--band-seeds", type=int, default=200, help="seeds used to estimate the band hit rate")
    args = ap.parse_args()

    G = coin_flip(args.dynamics)
    s = MixedStrategyProfile.uniform((2,))
    r = run(G, SimulationConfig(args.rounds, args.trials, args.seed, s))

    print(f"{'round':>7} {'ensemble mean':>15} {'median':>15} {'expected':>15}")
    for k, t in enumerate(r.checkpoints):
        if t <= 10 or t in (100, 1000, 10_000) or t == args.rounds:
            print(f"{t:>7} {r.ensemble_average_capital[k, 0]:>15.6g} {r.median_capital[k, 0]:>15.6g} "
                  f"{r.expected_capital[k, 0]:>15.6g}")

    est, se, th = r.time_average_growth_estimate[0], r.standard_error[0], r.theoretical_growth[0]
    print(f"\ntime-average growth {est:.6f} (SE {se:.2e}), expected {th:.6f}, "
          f"deviation {abs(est - th) / se:.2f} SE")

    if args.dynamics == "multiplicative":
        target = 100 * 1.05**10
        dev = np.array([run(G, SimulationConfig(10, args.trials, seed, s)).final_capitals[:, 0].mean() / target - 1
                        for seed in range(args.band_seeds)])
        var = 1.305**10 - 1.05**20  # Var of the round-10 growth factor
        print(f"\nround-10 ensemble mean over {args.band_seeds} seeds: mean deviation {100 * dev.mean():+.2f}%, "
              f"sd {100 * dev.std():.2f}% (analytic {100 * math.sqrt(var / args.trials) / 1.05**10:.2f}%), "
              f"within +/-{100 * args.band:.0f}% in {100 * (np.abs(dev) <= args.band).mean():.1f}% of seeds")


if __name__ == "__main__":
    main()
