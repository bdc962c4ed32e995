"""Capital games, capital dynamics and their linearizations.

A player's dynamics are represented only through the linearization ``v`` and
its inverse: every operation here (growth rates, the transformation to a
standard game and back, the repeated-game simulator) consumes ``v`` alone.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import reduce
from typing import Callable, Sequence

import numpy as np

from .game import (
    MixedStrategyProfile,
    ShapeError,
    StandardGame,
    _check_counts,
    _check_labels,
    _check_player,
    _shape_tensors,
    check_profile,
    profile_from_index,
)

log = logging.getLogger(__name__)

ADDITIVE = "additive"
MULTIPLICATIVE = "multiplicative"
CUSTOM = "custom"


class DomainError(ValueError):
    """Capital values outside a player's dynamics domain.

    ``violations`` lists every offending ``(player, profile, value)``; profile
    is None when the offending value is the endowment.
    """

    def __init__(self, message: str, violations: Sequence[tuple] = ()):
        super().__init__(message)
        self.violations = list(violations)


def _identity(x):
    return x


def _sqrt_inverse(y):
    y = np.asarray(y, dtype=float)
    with np.errstate(invalid="ignore"):
        return np.where(y >= 0, y * y, np.nan)


@dataclass(frozen=True)
class DynamicsSpec:
    """A dynamics family given by its linearization ``v`` on an open domain.

    ``v`` must be strictly increasing on ``domain`` and accept numpy arrays.
    """

    kind: str
    v: Callable
    v_inverse: Callable
    domain: tuple[float, float] = (-math.inf, math.inf)
    name: str = ""

    def __post_init__(self):
        if self.kind not in (ADDITIVE, MULTIPLICATIVE, CUSTOM):
            raise ValueError(f"unknown dynamics kind {self.kind!r}")
        lo, hi = self.domain
        if not lo < hi:
            raise ValueError(f"empty domain {self.domain}")
        if not self.name:
            object.__setattr__(self, "name", self.kind)

    def in_domain(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.domain
        return np.isfinite(x) & (x > lo) & (x < hi)

    @property
    def v_range(self) -> tuple[float, float]:
        """Image of the domain under ``v`` (open interval)."""
        lo, hi = self.domain
        with np.errstate(divide="ignore", invalid="ignore"):
            vlo = float(self.v(np.float64(lo))) if math.isfinite(lo) else -math.inf
            vhi = float(self.v(np.float64(hi))) if math.isfinite(hi) else math.inf
        if math.isnan(vlo):
            vlo = -math.inf
        if math.isnan(vhi):
            vhi = math.inf
        return vlo, vhi

    def __repr__(self):
        return f"DynamicsSpec({self.name!r})"


ADDITIVE_DYNAMICS = DynamicsSpec(ADDITIVE, _identity, _identity, name=ADDITIVE)
MULTIPLICATIVE_DYNAMICS = DynamicsSpec(MULTIPLICATIVE, np.log, np.exp, (0.0, math.inf), name=MULTIPLICATIVE)


def _sample_points(domain: tuple[float, float], k: int = 64) -> np.ndarray:
    lo, hi = domain
    if math.isfinite(lo) and math.isfinite(hi):
        return lo + (hi - lo) * np.linspace(0.01, 0.99, k)
    if math.isfinite(lo):
        return lo + np.geomspace(1e-3, 1e3, k)
    if math.isfinite(hi):
        return hi - np.geomspace(1e3, 1e-3, k)
    return np.linspace(-1e3, 1e3, k)


def custom_dynamics(name: str, v: Callable, v_inverse: Callable,
                    domain: tuple[float, float] = (-math.inf, math.inf),
                    samples: np.ndarray | None = None) -> DynamicsSpec:
    """Build a custom dynamics spec, checking it on sampled domain points.

    Raises ValueError if ``v`` is not strictly increasing on the samples or
    ``v_inverse`` does not undo it to within 1e-9 (relative above magnitude 1).
    """
    spec = DynamicsSpec(CUSTOM, v, v_inverse, tuple(domain), name)
    xs = np.sort(np.asarray(samples if samples is not None else _sample_points(spec.domain), dtype=float))
    vx = np.asarray(v(xs), dtype=float)
    if not np.all(np.diff(vx) > 0):
        raise ValueError(f"custom dynamics {name!r}: v is not strictly increasing on its domain")
    back = np.asarray(v_inverse(vx), dtype=float)
    if not np.all(np.abs(back - xs) <= 1e-9 * np.maximum(1.0, np.abs(xs))):
        raise ValueError(f"custom dynamics {name!r}: v_inverse(v(x)) != x")
    return spec


SQRT_DYNAMICS = custom_dynamics("sqrt", np.sqrt, _sqrt_inverse, (0.0, math.inf))

# Custom dynamics that game files may reference by name.
REGISTRY: dict[str, DynamicsSpec] = {"sqrt": SQRT_DYNAMICS}


def register_dynamics(spec: DynamicsSpec) -> None:
    if spec.kind != CUSTOM:
        raise ValueError("only custom dynamics can be registered")
    REGISTRY[spec.name] = spec


def dynamics_by_name(name) -> DynamicsSpec:
    """Resolve ``"additive"``, ``"multiplicative"`` or a registered custom name."""
    if isinstance(name, DynamicsSpec):
        return name
    if name == ADDITIVE:
        return ADDITIVE_DYNAMICS
    if name == MULTIPLICATIVE:
        return MULTIPLICATIVE_DYNAMICS
    if name in REGISTRY:
        return REGISTRY[name]
    raise KeyError(f"unknown dynamics {name!r}; known: additive, multiplicative, {', '.join(REGISTRY)}")


def growth_rate(d: DynamicsSpec, x, w: float, dt: float = 1.0):
    """Growth rate ``(v(x) - v(w)) / dt``; ``x`` may be an array."""
    if not dt > 0:
        raise ValueError(f"duration must be positive, got {dt}")
    if not d.in_domain(w):
        raise DomainError(f"endowment {w!r} outside {d.name} domain {d.domain}", [(None, None, w)])
    ok = d.in_domain(x)
    if not np.all(ok):
        bad = np.asarray(x, dtype=float)[~ok] if np.ndim(x) else [x]
        raise DomainError(f"capital value(s) {list(map(float, np.ravel(bad)))} outside {d.name} domain {d.domain}",
                          [(None, None, float(b)) for b in np.ravel(bad)])
    out = (np.asarray(d.v(np.asarray(x, dtype=float))) - d.v(np.float64(w))) / dt
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True, eq=False)
class CapitalGame:
    """Finite game with payoffs in capital, per-player endowments, durations and dynamics.

    Construction fails with DomainError if any endowment or payoff lies
    outside its player's dynamics domain.
    """

    action_counts: tuple[int, ...]
    payoffs: tuple[np.ndarray, ...]
    endowments: tuple[float, ...]
    dynamics: tuple[DynamicsSpec, ...]
    durations: tuple[float, ...] | None = None
    player_names: tuple[str, ...] | None = None
    action_names: tuple[tuple[str, ...], ...] | None = None

    def __post_init__(self):
        counts = _check_counts(self.action_counts)
        n = len(counts)
        # non-finite payoffs are reported as domain violations below
        payoffs = _shape_tensors(self.payoffs, counts, "payoffs")
        endowments = tuple(float(w) for w in self.endowments)
        durations = tuple(float(t) for t in self.durations) if self.durations is not None else (1.0,) * n
        dynamics = tuple(dynamics_by_name(d) for d in self.dynamics)
        for what, seq in (("endowments", endowments), ("durations", durations), ("dynamics", dynamics)):
            if len(seq) != n:
                raise ShapeError(f"{what}: expected {n} entries, got {len(seq)}")
        if not all(math.isfinite(w) for w in endowments):
            raise ValueError("endowments must be finite")
        if not all(math.isfinite(t) and t > 0 for t in durations):
            raise ValueError(f"durations must be positive and finite, got {durations}")
        object.__setattr__(self, "action_counts", counts)
        object.__setattr__(self, "payoffs", payoffs)
        object.__setattr__(self, "endowments", endowments)
        object.__setattr__(self, "durations", durations)
        object.__setattr__(self, "dynamics", dynamics)
        object.__setattr__(self, "player_names", _check_labels(self.player_names, n, "player names"))
        if self.action_names is not None:
            names = tuple(_check_labels(a, m, f"action names for player {i}")
                          for i, (a, m) in enumerate(zip(_check_labels(self.action_names, n, "action name lists"), counts)))
            object.__setattr__(self, "action_names", names)
        bad = domain_violations(self)
        if bad:
            raise DomainError(_describe_violations(self, bad), bad)

    @property
    def num_players(self) -> int:
        return len(self.action_counts)

    @property
    def is_positive(self) -> bool:
        return is_positive(self)

    def flat_payoffs(self, i: int) -> np.ndarray:
        return self.payoffs[i].ravel()

    def growth_tensor(self, i: int) -> np.ndarray:
        """Per-profile growth rates of player ``i``."""
        return growth_rate(self.dynamics[i], self.payoffs[i], self.endowments[i], self.durations[i])

    def with_dynamics(self, dynamics: Sequence) -> "CapitalGame":
        return CapitalGame(self.action_counts, self.payoffs, self.endowments, tuple(dynamics),
                           self.durations, self.player_names, self.action_names)

    def __eq__(self, other):
        if not isinstance(other, CapitalGame):
            return NotImplemented
        return (self.action_counts == other.action_counts
                and all(np.array_equal(a, b) for a, b in zip(self.payoffs, other.payoffs))
                and self.endowments == other.endowments
                and self.durations == other.durations
                and tuple(d.name for d in self.dynamics) == tuple(d.name for d in other.dynamics)
                and self.player_names == other.player_names
                and self.action_names == other.action_names)

    __hash__ = None


def domain_violations(G: CapitalGame) -> list[tuple]:
    """Every ``(player, profile, value)`` outside its player's dynamics domain."""
    bad = []
    for i, d in enumerate(G.dynamics):
        if not d.in_domain(G.endowments[i]):
            bad.append((i, None, G.endowments[i]))
        flat = G.payoffs[i].ravel()
        for k in np.flatnonzero(~d.in_domain(flat)):
            bad.append((i, profile_from_index(G.action_counts, int(k)), float(flat[k])))
    return bad


def _describe_violations(G: CapitalGame, bad: list[tuple]) -> str:
    lines = [f"{len(bad)} value(s) outside dynamics domains:"]
    for i, prof, value in bad:
        where = "endowment" if prof is None else f"payoff at profile {prof}"
        lines.append(f"  player {i} ({G.dynamics[i].name}, domain {G.dynamics[i].domain}): {where} = {value!r}")
    return "\n".join(lines)


def is_positive(G: CapitalGame) -> bool:
    return all(w > 0 for w in G.endowments) and all(bool(np.all(p > 0)) for p in G.payoffs)


def _joint_probabilities(strategies: Sequence[np.ndarray]) -> np.ndarray:
    return reduce(np.multiply.outer, strategies)


def time_average_growth(G: CapitalGame, s: MixedStrategyProfile, i: int) -> float:
    """Expected growth rate of player ``i`` under ``s``, which equals its time average."""
    check_profile(G.action_counts, s)
    _check_player(G.num_players, i)
    return float(np.sum(G.growth_tensor(i) * _joint_probabilities(s.strategies)))


def to_standard_game(G: CapitalGame) -> StandardGame:
    """Standard game whose utilities are the capital game's growth rates."""
    bad = domain_violations(G)
    if bad:
        raise DomainError(_describe_violations(G, bad), bad)
    return StandardGame(G.action_counts, tuple(G.growth_tensor(i) for i in range(G.num_players)),
                        G.player_names, G.action_names)


def from_standard_game(g: StandardGame, endowments: Sequence[float], dynamics: Sequence,
                       durations: Sequence[float] | None = None) -> CapitalGame:
    """Capital game whose growth rates are ``g``'s utilities.

    Payoffs are ``v_inverse(u * dt + v(w))`` per player, so additive gives
    ``u*dt + w`` and multiplicative gives ``w * exp(u*dt)``.
    """
    n = g.num_players
    endowments = tuple(float(w) for w in endowments)
    dynamics = tuple(dynamics_by_name(d) for d in dynamics)
    durations = tuple(float(t) for t in durations) if durations is not None else (1.0,) * n
    if len(endowments) != n or len(dynamics) != n or len(durations) != n:
        raise ShapeError(f"need {n} endowments, dynamics and durations")
    if not all(w > 0 for w in endowments):
        raise ValueError(f"endowments must be positive, got {endowments}")
    if not all(t > 0 for t in durations):
        raise ValueError(f"durations must be positive, got {durations}")
    payoffs = []
    for i, (d, w, t) in enumerate(zip(dynamics, endowments, durations)):
        with np.errstate(over="ignore", invalid="ignore"):
            if d.kind == ADDITIVE:
                x = g.payoffs[i] * t + w
            elif d.kind == MULTIPLICATIVE:
                x = w * np.exp(g.payoffs[i] * t)
            else:
                x = np.asarray(d.v_inverse(g.payoffs[i] * t + d.v(np.float64(w))), dtype=float)
        payoffs.append(x)
    G = CapitalGame(g.action_counts, tuple(payoffs), endowments, dynamics, durations,
                    g.player_names, g.action_names)
    if not G.is_positive:
        log.info("constructed capital game is not positive; multiplicative reinterpretation would be invalid")
    return G


@dataclass(frozen=True)
class Gamble:
    """Real-valued lottery played out over ``duration``."""

    outcomes: tuple[tuple[float, float], ...]
    duration: float = 1.0

    def __post_init__(self):
        outcomes = tuple((float(q), float(p)) for q, p in self.outcomes)
        if not outcomes:
            raise ValueError("a gamble needs at least one outcome")
        if any(p < 0 for _, p in outcomes):
            raise ValueError("gamble probabilities must be nonnegative")
        if abs(sum(p for _, p in outcomes) - 1.0) > 1e-9:
            raise ValueError("gamble probabilities must sum to 1")
        if not self.duration > 0:
            raise ValueError("gamble duration must be positive")
        object.__setattr__(self, "outcomes", outcomes)

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(q for q, _ in self.outcomes)

    @property
    def probabilities(self) -> tuple[float, ...]:
        return tuple(p for _, p in self.outcomes)

    def expected_value(self) -> float:
        return sum(q * p for q, p in self.outcomes)

    def growth_rate(self, d: DynamicsSpec, w: float) -> float:
        """Expected growth rate of this gamble from endowment ``w``."""
        return sum(p * growth_rate(d, q, w, self.duration) for q, p in self.outcomes)


def gamble_from_response(G: CapitalGame, i: int, s_i, s_minus_i: Sequence) -> Gamble:
    """The gamble player ``i`` faces by playing ``s_i`` against ``s_minus_i``.

    Outcomes with exactly equal capital are merged; order is by first
    appearance in canonical profile order.
    """
    _check_player(G.num_players, i)
    others = list(s_minus_i)
    if len(others) != G.num_players - 1:
        raise ShapeError(f"expected {G.num_players - 1} opponent strategies, got {len(others)}")
    s = MixedStrategyProfile(tuple(others[:i]) + (s_i,) + tuple(others[i:]))
    check_profile(G.action_counts, s)
    probs = _joint_probabilities(s.strategies).ravel()
    values = G.flat_payoffs(i)
    merged: dict[float, float] = {}
    for k in np.flatnonzero(probs > 0):
        q = float(values[k])
        merged[q] = merged.get(q, 0.0) + float(probs[k])
    return Gamble(tuple(merged.items()), G.durations[i])
