"""Standard (utility-unit) normal-form games.

Payoff tensors are stored as numpy arrays whose shape is the tuple of action
counts, in C order. The canonical flat index of an action profile therefore
has the last player varying fastest, and ``payoffs[i].ravel()`` is exactly the
per-player flat array used by the file format.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

TIE_TOL = 1e-9
PROB_TOL = 1e-9


class ShapeError(ValueError):
    """Raised when strategies, profiles or tensors do not fit a game's shape."""


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


def num_profiles(action_counts: Sequence[int]) -> int:
    return math.prod(action_counts)


def profile_index(action_counts: Sequence[int], actions: Sequence[int]) -> int:
    """Canonical flat index of ``actions`` (last player varies fastest)."""
    if len(actions) != len(action_counts):
        raise ShapeError(f"profile has {len(actions)} actions, game has {len(action_counts)} players")
    for i, (a, m) in enumerate(zip(actions, action_counts)):
        if not 0 <= a < m:
            raise ShapeError(f"action {a} out of range for player {i} with {m} actions")
    return int(np.ravel_multi_index(tuple(actions), tuple(action_counts)))


def profile_from_index(action_counts: Sequence[int], index: int) -> tuple[int, ...]:
    return tuple(int(a) for a in np.unravel_index(index, tuple(action_counts)))


def _check_counts(action_counts: Sequence[int]) -> tuple[int, ...]:
    counts = tuple(int(m) for m in action_counts)
    if len(counts) < 1:
        raise ShapeError("a game needs at least one player")
    if any(m < 1 for m in counts):
        raise ShapeError(f"every player needs at least one action, got {counts}")
    return counts


def _check_labels(names, expected: int, what: str):
    if names is None:
        return None
    names = tuple(names)
    if len(names) != expected:
        raise ShapeError(f"expected {expected} {what}, got {len(names)}")
    return names


@dataclass(frozen=True, eq=False)
class StandardGame:
    """Finite n-player game with payoffs in utility units.

    ``payoffs`` may be given flat (canonical order) or already shaped; it is
    stored as one read-only array of shape ``action_counts`` per player.
    """

    action_counts: tuple[int, ...]
    payoffs: tuple[np.ndarray, ...]
    player_names: tuple[str, ...] | None = None
    action_names: tuple[tuple[str, ...], ...] | None = None

    def __post_init__(self):
        counts = _check_counts(self.action_counts)
        payoffs = _shape_tensors(self.payoffs, counts, "payoffs")
        for i, p in enumerate(payoffs):
            if not np.all(np.isfinite(p)):
                raise ValueError(f"payoffs[{i}] contains non-finite entries")
        object.__setattr__(self, "action_counts", counts)
        object.__setattr__(self, "payoffs", payoffs)
        object.__setattr__(self, "player_names", _check_labels(self.player_names, len(counts), "player names"))
        if self.action_names is not None:
            names = _check_labels(self.action_names, len(counts), "action name lists")
            names = tuple(_check_labels(n, m, f"action names for player {i}")
                          for i, (n, m) in enumerate(zip(names, counts)))
            object.__setattr__(self, "action_names", names)

    @classmethod
    def from_arrays(cls, *payoffs, **labels) -> "StandardGame":
        """Build from shaped per-player arrays, e.g. two bimatrix halves."""
        arrays = [np.asarray(p, dtype=float) for p in payoffs]
        return cls(arrays[0].shape, tuple(arrays), **labels)

    @property
    def num_players(self) -> int:
        return len(self.action_counts)

    @property
    def num_profiles(self) -> int:
        return num_profiles(self.action_counts)

    def flat_payoffs(self, i: int) -> np.ndarray:
        return self.payoffs[i].ravel()

    def payoff(self, i: int, actions: Sequence[int]) -> float:
        return float(self.payoffs[i][tuple(actions)])

    def profiles(self):
        """All action profiles in canonical order."""
        return itertools.product(*(range(m) for m in self.action_counts))

    def __eq__(self, other):
        if not isinstance(other, StandardGame):
            return NotImplemented
        return (self.action_counts == other.action_counts
                and all(np.array_equal(a, b) for a, b in zip(self.payoffs, other.payoffs))
                and self.player_names == other.player_names
                and self.action_names == other.action_names)

    __hash__ = None


def _shape_tensors(tensors, counts: tuple[int, ...], what: str) -> tuple[np.ndarray, ...]:
    tensors = tuple(tensors)
    if len(tensors) != len(counts):
        raise ShapeError(f"{what}: expected {len(counts)} tensors, got {len(tensors)}")
    size = num_profiles(counts)
    out = []
    for i, t in enumerate(tensors):
        arr = np.asarray(t, dtype=float)
        if arr.size != size:
            raise ShapeError(f"{what}[{i}] has {arr.size} entries, expected {size}")
        if arr.shape != counts and arr.ndim != 1:
            raise ShapeError(f"{what}[{i}] has shape {arr.shape}, expected {counts} or flat")
        out.append(_freeze(arr.reshape(counts)))
    return tuple(out)


@dataclass(frozen=True, eq=False)
class MixedStrategyProfile:
    """One probability vector per player."""

    strategies: tuple[np.ndarray, ...]
    tol: float = field(default=PROB_TOL, repr=False)

    def __post_init__(self):
        strategies = tuple(_freeze(np.atleast_1d(np.asarray(s, dtype=float))) for s in self.strategies)
        if not strategies:
            raise ShapeError("a profile needs at least one strategy")
        for i, s in enumerate(strategies):
            if s.ndim != 1 or s.size < 1:
                raise ShapeError(f"strategy {i} must be a non-empty vector")
            if not np.all(np.isfinite(s)) or np.any(s < 0) or np.any(s > 1):
                raise ValueError(f"strategy {i} has entries outside [0, 1]: {s}")
            if abs(s.sum() - 1.0) > self.tol:
                raise ValueError(f"strategy {i} sums to {s.sum()!r}, not 1")
        object.__setattr__(self, "strategies", strategies)

    @classmethod
    def pure(cls, action_counts: Sequence[int], actions: Sequence[int]) -> "MixedStrategyProfile":
        profile_index(action_counts, actions)
        vecs = []
        for a, m in zip(actions, action_counts):
            v = np.zeros(m)
            v[a] = 1.0
            vecs.append(v)
        return cls(tuple(vecs))

    @classmethod
    def uniform(cls, action_counts: Sequence[int]) -> "MixedStrategyProfile":
        return cls(tuple(np.full(m, 1.0 / m) for m in action_counts))

    @property
    def action_counts(self) -> tuple[int, ...]:
        return tuple(s.size for s in self.strategies)

    @property
    def num_players(self) -> int:
        return len(self.strategies)

    def __getitem__(self, i: int) -> np.ndarray:
        return self.strategies[i]

    def __len__(self) -> int:
        return len(self.strategies)

    def support(self, i: int) -> tuple[int, ...]:
        return tuple(int(j) for j in np.flatnonzero(self.strategies[i] > 0))

    @property
    def is_pure(self) -> bool:
        return all(np.count_nonzero(s) == 1 for s in self.strategies)

    @property
    def actions(self) -> tuple[int, ...] | None:
        """The action profile if every strategy is degenerate, else None."""
        if not self.is_pure:
            return None
        return tuple(int(np.argmax(s)) for s in self.strategies)

    def replace(self, i: int, strategy) -> "MixedStrategyProfile":
        strategies = list(self.strategies)
        strategies[i] = strategy
        return MixedStrategyProfile(tuple(strategies))

    def tolist(self) -> list[list[float]]:
        return [s.tolist() for s in self.strategies]

    def __eq__(self, other):
        if not isinstance(other, MixedStrategyProfile):
            return NotImplemented
        return (len(self) == len(other)
                and all(np.array_equal(a, b) for a, b in zip(self.strategies, other.strategies)))

    __hash__ = None


def check_profile(action_counts: Sequence[int], s: MixedStrategyProfile) -> None:
    if s.action_counts != tuple(action_counts):
        raise ShapeError(f"profile shape {s.action_counts} does not match game shape {tuple(action_counts)}")


def _check_player(n: int, i: int) -> None:
    if not 0 <= i < n:
        raise IndexError(f"player index {i} out of range for {n} players")


def profile_probability(s: MixedStrategyProfile, a: Sequence[int]) -> float:
    """Probability that independent play of ``s`` realizes action profile ``a``."""
    if len(a) != len(s):
        raise ShapeError(f"profile has {len(a)} actions, strategy profile has {len(s)} players")
    p = 1.0
    for i, (si, ai) in enumerate(zip(s.strategies, a)):
        if not 0 <= ai < si.size:
            raise ShapeError(f"action {ai} out of range for player {i}")
        p *= float(si[ai])
    return p


def action_values(payoff: np.ndarray, strategies: Sequence[np.ndarray], i: int) -> np.ndarray:
    """Expected payoff of each pure action of player ``i`` against the others.

    ``strategies[i]`` is ignored and may be None.
    """
    t = payoff
    # contract from the last axis so lower axis numbers stay put
    for j in reversed(range(payoff.ndim)):
        if j != i:
            t = np.tensordot(t, strategies[j], axes=([j], [0]))
    return t


def expected_utility(g: StandardGame, s: MixedStrategyProfile, i: int) -> float:
    check_profile(g.action_counts, s)
    _check_player(g.num_players, i)
    return float(action_values(g.payoffs[i], s.strategies, i) @ s.strategies[i])


def _with_placeholder(g: StandardGame, s_minus_i: Sequence, i: int) -> list:
    others = [np.asarray(v, dtype=float) for v in s_minus_i]
    if len(others) != g.num_players - 1:
        raise ShapeError(f"expected {g.num_players - 1} opponent strategies, got {len(others)}")
    full = others[:i] + [None] + others[i:]
    for j, v in enumerate(full):
        if j == i:
            continue
        if v.shape != (g.action_counts[j],):
            raise ShapeError(f"strategy for player {j} has shape {v.shape}, expected ({g.action_counts[j]},)")
        if np.any(v < 0) or abs(v.sum() - 1.0) > PROB_TOL:
            raise ValueError(f"strategy for player {j} is not a probability vector")
    return full


def best_response_set(g: StandardGame, s_minus_i: Sequence, i: int,
                      tie_tol: float = TIE_TOL) -> tuple[float, frozenset[int]]:
    """Best achievable expected utility for player ``i`` and the pure actions attaining it.

    Any mixture over the returned actions is itself a best response.
    """
    _check_player(g.num_players, i)
    full = _with_placeholder(g, s_minus_i, i)
    values = action_values(g.payoffs[i], full, i)
    best = float(values.max())
    return best, frozenset(int(j) for j in np.flatnonzero(values >= best - tie_tol))


def regret(g: StandardGame, s: MixedStrategyProfile, i: int) -> float:
    """Signed gain from player ``i``'s best unilateral deviation (not clamped)."""
    check_profile(g.action_counts, s)
    _check_player(g.num_players, i)
    values = action_values(g.payoffs[i], s.strategies, i)
    return float(values.max() - values @ s.strategies[i])


def regrets(g: StandardGame, s: MixedStrategyProfile) -> tuple[float, ...]:
    return tuple(regret(g, s, i) for i in range(g.num_players))


def is_nash(g: StandardGame, s: MixedStrategyProfile, eps: float = TIE_TOL) -> bool:
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    return all(r <= eps for r in regrets(g, s))
