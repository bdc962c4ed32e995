"""Equilibrium solvers for standard games and growth equilibria of capital games.

Pure equilibria are found by exhaustive profile checking for any number of
players. Mixed equilibria are computed only for two-player games, by support
enumeration. For three or more players results are pure-only and say so.
"""
from __future__ import annotations

import itertools
import logging
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dynamics import CapitalGame, time_average_growth, to_standard_game
from .game import (
    TIE_TOL,
    MixedStrategyProfile,
    StandardGame,
    check_profile,
    profile_from_index,
    regrets,
)

log = logging.getLogger(__name__)

PURE_PROFILE_CAP = 10**7
SUPPORT_ACTION_CAP = 12
SOLVE_EPS = 1e-8
PIVOT_TOL = 1e-12
DEDUP_TOL = 1e-7

PURE = "pure"
MIXED = "mixed"
DIRECT = "direct"
VIA_CORRESPONDENCE = "via_correspondence"
COMPLETE = "complete"
PURE_ONLY = "pure_only"


class SizeError(ValueError):
    """Game too large for an exhaustive solver."""


class ArityError(ValueError):
    """Solver does not support this number of players."""


class PartialCoverageWarning(UserWarning):
    """Only pure equilibria were searched for."""


@dataclass(frozen=True, eq=False)
class EquilibriumResult:
    profile: MixedStrategyProfile
    classification: str
    per_player_regret: tuple[float, ...]
    source: str = DIRECT
    coverage: str = COMPLETE

    @property
    def is_pure(self) -> bool:
        return self.classification == PURE

    @property
    def actions(self) -> tuple[int, ...] | None:
        return self.profile.actions


def _classify(profile: MixedStrategyProfile) -> str:
    return PURE if profile.is_pure else MIXED


def enumerate_pure_nash(g: StandardGame, tie_tol: float = TIE_TOL,
                        cap: int = PURE_PROFILE_CAP) -> list[EquilibriumResult]:
    """All pure Nash equilibria, in canonical profile order."""
    if g.num_profiles > cap:
        raise SizeError(f"{g.num_profiles} action profiles exceed the cap of {cap}")
    gaps = [p.max(axis=i, keepdims=True) - p for i, p in enumerate(g.payoffs)]
    stable = np.logical_and.reduce([gap <= tie_tol for gap in gaps]).ravel()
    out = []
    for k in np.flatnonzero(stable):
        actions = profile_from_index(g.action_counts, int(k))
        out.append(EquilibriumResult(
            MixedStrategyProfile.pure(g.action_counts, actions), PURE,
            tuple(max(0.0, float(gap[actions])) for gap in gaps)))
    return out


def enumerate_pure_growth_equilibria(G: CapitalGame, tie_tol: float = TIE_TOL,
                                     cap: int = PURE_PROFILE_CAP) -> list[EquilibriumResult]:
    """Pure growth equilibria; the set is the same under any choice of dynamics."""
    return [EquilibriumResult(r.profile, r.classification, r.per_player_regret, VIA_CORRESPONDENCE)
            for r in enumerate_pure_nash(to_standard_game(G), tie_tol, cap)]


def solve_pivoting(M: np.ndarray, b: np.ndarray, pivot_tol: float = PIVOT_TOL) -> np.ndarray | None:
    """Solve the square system ``M x = b`` by Gaussian elimination with partial pivoting.

    Returns None when a pivot falls below ``pivot_tol``.
    """
    A = np.array(M, dtype=float)
    x = np.array(b, dtype=float)
    n = A.shape[0]
    for col in range(n):
        piv = col + int(np.argmax(np.abs(A[col:, col])))
        if abs(A[piv, col]) < pivot_tol:
            return None
        if piv != col:
            A[[col, piv]] = A[[piv, col]]
            x[[col, piv]] = x[[piv, col]]
        factors = A[col + 1:, col] / A[col, col]
        A[col + 1:, col:] -= np.outer(factors, A[col, col:])
        x[col + 1:] -= factors * x[col]
    for row in range(n - 1, -1, -1):
        x[row] = (x[row] - A[row, row + 1:] @ x[row + 1:]) / A[row, row]
    return x


def _indifference(payoff: np.ndarray, own: Sequence[int], other: Sequence[int]) -> np.ndarray | None:
    """Mixture over ``other`` making the owner of ``payoff`` indifferent across ``own``.

    ``payoff`` is indexed [own action, other action]. Square systems use
    partial pivoting; rectangular ones (possible only in degenerate games)
    fall back to least squares and must be consistent.
    """
    k, m = len(own), len(other)
    M = np.zeros((k + 1, m + 1))
    M[:k, :m] = payoff[np.ix_(own, other)]
    M[:k, m] = -1.0
    M[k, :m] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    if k == m:
        sol = solve_pivoting(M, rhs)
    else:
        sol = np.linalg.lstsq(M, rhs, rcond=None)[0]
        scale = max(1.0, float(np.abs(M).max()))
        if np.abs(M @ sol - rhs).max() > 1e-9 * scale:
            return None
    return None if sol is None else sol[:m]


def _support_pairs(m: int, n: int):
    """Support pairs by increasing total size, then lexicographically."""
    for total in range(2, m + n + 1):
        pairs = []
        for k in range(max(1, total - n), min(m, total - 1) + 1):
            pairs.extend(itertools.product(itertools.combinations(range(m), k),
                                           itertools.combinations(range(n), total - k)))
        yield from sorted(pairs)


def _embed(size: int, support: Sequence[int], values: np.ndarray, eps: float) -> np.ndarray | None:
    if np.any(values < -eps):
        return None
    v = np.zeros(size)
    v[list(support)] = values
    v[v <= eps] = 0.0
    total = v.sum()
    if total <= 0:
        return None
    return v / total


def support_enumeration_2p(g: StandardGame, eps: float = SOLVE_EPS,
                           cap: int = SUPPORT_ACTION_CAP) -> list[EquilibriumResult]:
    """Equilibria of a two-player game by enumerating all support pairs.

    Support pairs are not restricted to equal sizes, so degenerate games are
    handled. Solutions closer than ``DEDUP_TOL`` in max norm are merged.
    """
    if g.num_players != 2:
        raise ArityError(f"support enumeration needs exactly 2 players, got {g.num_players}")
    m, n = g.action_counts
    if max(m, n) > cap:
        raise SizeError(f"action counts {g.action_counts} exceed the cap of {cap}")
    A, B = g.payoffs
    found: list[EquilibriumResult] = []
    for I, J in _support_pairs(m, n):
        y = _indifference(A, I, J)
        if y is None:
            continue
        x = _indifference(B.T, J, I)
        if x is None:
            continue
        x, y = _embed(m, I, x, eps), _embed(n, J, y, eps)
        if x is None or y is None:
            continue
        if any(np.abs(x - r.profile[0]).max() < DEDUP_TOL and np.abs(y - r.profile[1]).max() < DEDUP_TOL
               for r in found):
            continue
        profile = MixedStrategyProfile((x, y))
        regs = regrets(g, profile)
        if max(regs) > eps:
            continue
        found.append(EquilibriumResult(profile, _classify(profile), tuple(max(0.0, r) for r in regs)))
    if not found:
        log.warning("support enumeration found no equilibrium for game with shape %s", g.action_counts)
    return found


def verify_growth_equilibrium(G: CapitalGame, s: MixedStrategyProfile,
                              eps: float = TIE_TOL) -> tuple[bool, tuple[float, ...]]:
    """Check that no player can raise their time-average growth by more than ``eps``.

    Works on the capital game directly; returns the verdict and clamped regrets.
    """
    check_profile(G.action_counts, s)
    out = []
    for i, m in enumerate(G.action_counts):
        current = time_average_growth(G, s, i)
        best = max(time_average_growth(G, s.replace(i, np.eye(m)[a]), i) for a in range(m))
        out.append(best - current)
    return all(r <= eps for r in out), tuple(max(0.0, r) for r in out)


def growth_equilibria(G: CapitalGame, eps: float = SOLVE_EPS) -> list[EquilibriumResult]:
    """Growth equilibria via the standard game of growth rates.

    Two-player games get pure and mixed equilibria. One-player games get the
    pure maximizers (every equilibrium mixes over them). Games with three or
    more players get pure equilibria only, marked ``coverage="pure_only"``,
    with a PartialCoverageWarning.
    """
    g = to_standard_game(G)
    coverage = COMPLETE
    if g.num_players == 2:
        candidates = support_enumeration_2p(g, eps)
    else:
        candidates = enumerate_pure_nash(g)
        if g.num_players > 2:
            coverage = PURE_ONLY
            warnings.warn(f"mixed equilibria are not computed for {g.num_players} players; "
                          "returning pure growth equilibria only", PartialCoverageWarning, stacklevel=2)
    out = []
    for r in candidates:
        ok, regs = verify_growth_equilibrium(G, r.profile, eps)
        if not ok:
            log.warning("dropping %s: regrets %s on the capital game exceed %g", r.profile.tolist(), regs, eps)
            continue
        out.append(EquilibriumResult(r.profile, r.classification, regs, VIA_CORRESPONDENCE, coverage))
    return out
