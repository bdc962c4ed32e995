"""Random positive capital games: growth equilibria versus Nash equilibria of
the transformed game, and pure-equilibrium invariance across dynamics.

    python scripts/correspondence_sweep.py --games 200 --seed 0
"""
import argparse
import itertools
import math
import warnings

import numpy as np

from capgames import (
    CapitalGame,
    enumerate_pure_growth_equilibria,
    growth_equilibria,
    is_nash,
    support_enumeration_2p,
    to_standard_game,
    verify_growth_equilibrium,
)
from capgames.solvers import PartialCoverageWarning

DYNAMICS = ("additive", "multiplicative", "sqrt")


def random_game(rng, n, max_actions):
    counts = tuple(int(m) for m in rng.integers(1, max_actions + 1, n))
    payoffs = tuple(rng.uniform(0.1, 10.0, math.prod(counts)) for _ in range(n))
    dyn = tuple(DYNAMICS[k] for k in rng.integers(0, 3, n))
    return CapitalGame(counts, payoffs, tuple(rng.uniform(0.1, 10.0, n)), dyn)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--games", type=int, default=200)
    ap.add_argument("--players", type=int, default=2)
    ap.add_argument("--max-actions", type=int, default=3)
    ap.add_argument("--eps", type=float, default=1e-8)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    warnings.simplefilter("ignore", PartialCoverageWarning)

    rng = np.random.default_rng(args.seed)
    totals = dict(equilibria=0, mixed=0, forward_fail=0, backward_fail=0, invariance_fail=0)
    for _ in range(args.games):
        G = random_game(rng, args.players, args.max_actions)
        g = to_standard_game(G)
        res = growth_equilibria(G, args.eps)
        totals["equilibria"] += len(res)
        totals["mixed"] += sum(not r.is_pure for r in res)
        totals["forward_fail"] += sum(not is_nash(g, r.profile, args.eps) for r in res)
        if args.players == 2:
            totals["backward_fail"] += sum(not verify_growth_equilibrium(G, r.profile, args.eps)[0]
                                           for r in support_enumeration_2p(g, args.eps))
        sets = {tuple(r.actions for r in enumerate_pure_growth_equilibria(G.with_dynamics(d)))
                for d in itertools.product(DYNAMICS, repeat=args.players)}
        totals["invariance_fail"] += len(sets) != 1

    for k, v in totals.items():
        print(f"{k:>16}: {v}")


if __name__ == "__main__":
    main()
