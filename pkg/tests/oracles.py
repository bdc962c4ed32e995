"""Brute-force oracles. These loop over profiles explicitly and never call
into the tensor code they are used to check."""
import itertools
import math

import numpy as np
from scipy import ndimage


def profiles(counts):
    return itertools.product(*(range(m) for m in counts))


def flat_index(counts, a):
    k = 0
    for ai, m in zip(a, counts):
        k = k * m + ai
    return k


def prob(strategies, a):
    return math.prod(float(s[ai]) for s, ai in zip(strategies, a))


def expected(flat, counts, strategies):
    return sum(flat[flat_index(counts, a)] * prob(strategies, a) for a in profiles(counts))


def deviation_values(flat, counts, strategies, i):
    out = []
    for ai in range(counts[i]):
        e = np.zeros(counts[i])
        e[ai] = 1.0
        s = list(strategies)
        s[i] = e
        out.append(expected(flat, counts, s))
    return out


def regret(flat, counts, strategies, i):
    return max(deviation_values(flat, counts, strategies, i)) - expected(flat, counts, strategies)


def is_nash(flats, counts, strategies, eps):
    return all(regret(f, counts, strategies, i) <= eps for i, f in enumerate(flats))


def pure_equilibria(flats, counts, tol=1e-9):
    """Profiles where nobody gains from a unilateral pure deviation."""
    out = []
    for a in profiles(counts):
        stable = True
        for i, f in enumerate(flats):
            here = f[flat_index(counts, a)]
            for d in range(counts[i]):
                b = list(a)
                b[i] = d
                if f[flat_index(counts, b)] > here + tol:
                    stable = False
        if stable:
            out.append(tuple(a))
    return out


def grid_equilibria_2x2(A, B, step=1e-3):
    """Clusters of grid points (p, q) = (P(row 0), P(col 0)) lying on both
    best-response graphs, each thickened by one grid step.

    A point passes for the row player if p is within ``step`` of a best
    response to some q' within ``step`` of q (and symmetrically for the
    column player). Each advantage is linear in the opponent's probability,
    so its range over that window is spanned by the window's endpoints.
    """
    A, B = np.asarray(A, float), np.asarray(B, float)
    g = np.linspace(0.0, 1.0, int(round(1 / step)) + 1)
    P, Q = np.meshgrid(g, g, indexing="ij")

    def passes(own, opp, adv0, adv1):
        # advantage of own action 0 over action 1 when the opponent plays 0 w.p. t
        lo_t, hi_t = np.clip(opp - step, 0, 1), np.clip(opp + step, 0, 1)
        d_lo = adv0 * lo_t + adv1 * (1 - lo_t)
        d_hi = adv0 * hi_t + adv1 * (1 - hi_t)
        dmin, dmax = np.minimum(d_lo, d_hi), np.maximum(d_lo, d_hi)
        return np.where(dmin > 0, own >= 1 - step, np.where(dmax < 0, own <= step, True))

    row_ok = passes(P, Q, A[0, 0] - A[1, 0], A[0, 1] - A[1, 1])
    col_ok = passes(Q, P, B[0, 0] - B[0, 1], B[1, 0] - B[1, 1])
    labels, count = ndimage.label(row_ok & col_ok, structure=np.ones((3, 3)))
    return [np.column_stack([P[labels == k], Q[labels == k]]) for k in range(1, count + 1)]
