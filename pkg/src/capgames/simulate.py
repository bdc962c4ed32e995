"""Monte Carlo simulation of repeated capital games.

Each round's payoff becomes the next round's endowment while the dynamics
stay fixed: a player's per-profile growth increment ``v(x(a)) - v(w0)`` is
held constant, so in linearized units every player follows a random walk.
Trials accumulate the displacement from ``v(w0)``; multiplicative players are
therefore tracked in log space and never overflow.

Random numbers come from numpy's Philox4x64-10 counter-based generator. Trial
``k`` of a run with seed ``s`` is keyed by ``SeedSequence(s, spawn_key=(k,))``,
so streams are independent, reproducible across platforms and independent of
how trials are scheduled.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import reduce
from typing import NamedTuple, Sequence

import numpy as np

from .dynamics import ADDITIVE, MULTIPLICATIVE, CapitalGame, time_average_growth
from .game import MixedStrategyProfile, check_profile

RNG_ALGORITHM = "numpy.random.Philox (Philox4x64-10), per-trial SeedSequence(seed, spawn_key=(trial,))"


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(trial,))))


def checkpoint_rounds(rounds: int) -> tuple[int, ...]:
    """Rounds 0..10, then ten per decade up to ``rounds``, plus ``rounds`` itself."""
    cps = set(range(min(rounds, 10) + 1))
    k = 10
    while (r := round(10 ** (k / 10))) <= rounds:
        cps.add(r)
        k += 1
    cps.add(rounds)
    return tuple(sorted(cps))


@dataclass(frozen=True)
class SimulationConfig:
    rounds: int
    trials: int
    seed: int
    profile: MixedStrategyProfile
    record_trajectories: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.rounds < 1 or self.trials < 1:
            raise ValueError(f"rounds and trials must be >= 1, got {self.rounds}, {self.trials}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


class Step(NamedTuple):
    endowments: tuple[float, ...]
    actions: tuple[int, ...]
    absorbed: bool


class ErgodicityResult(NamedTuple):
    estimate: float
    theoretical: float
    abs_error: float
    standard_error: float


@dataclass(frozen=True, eq=False)
class SimulationReport:
    seed: int
    rounds: int
    trials: int
    profile: MixedStrategyProfile
    checkpoints: tuple[int, ...]
    # per player
    time_average_growth_estimate: tuple[float, ...]
    standard_error: tuple[float, ...]
    theoretical_growth: tuple[float, ...]
    initial_capital: tuple[float, ...]
    # (len(checkpoints), players)
    ensemble_average_capital: np.ndarray
    median_capital: np.ndarray
    expected_capital: np.ndarray
    # (trials, players); NaN for absorbed trials
    final_capitals: np.ndarray
    absorbed_trials: tuple[tuple[int, int], ...] = ()
    realized_actions: np.ndarray | None = field(default=None, repr=False)
    trajectories: np.ndarray | None = field(default=None, repr=False)

    @property
    def absorbed(self) -> int:
        return len(self.absorbed_trials)

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "kind": "simulation_report",
            "rng": RNG_ALGORITHM,
            "seed": self.seed,
            "rounds": self.rounds,
            "trials": self.trials,
            "profile": self.profile.tolist(),
            "time_average_growth_estimate": list(self.time_average_growth_estimate),
            "standard_error": list(self.standard_error),
            "theoretical_growth": list(self.theoretical_growth),
            "initial_capital": list(self.initial_capital),
            "checkpoints": list(self.checkpoints),
            "ensemble_average_capital": self.ensemble_average_capital.tolist(),
            "median_capital": self.median_capital.tolist(),
            "expected_capital": self.expected_capital.tolist(),
            "final_capitals": self.final_capitals.tolist(),
            "absorbed": self.absorbed,
            "absorbed_trials": [list(t) for t in self.absorbed_trials],
        }

    def trajectory_rows(self):
        """``(round, trial, player, capital)`` rows, trial-major."""
        if self.trajectories is None:
            raise ValueError("trajectories were not recorded")
        M, T1, n = self.trajectories.shape
        for k in range(M):
            for t in range(T1):
                for i in range(n):
                    yield t, k, i, float(self.trajectories[k, t, i])


class _Prepared(NamedTuple):
    cdfs: tuple[np.ndarray, ...]
    increments: tuple[np.ndarray, ...]   # flat, linearized units per round
    growth: tuple[np.ndarray, ...]       # flat growth rates (increment / dt)
    v0: np.ndarray
    # admissible displacement from v0, open interval
    d_lo: np.ndarray
    d_hi: np.ndarray


def _increment(d, x: np.ndarray, w0: float) -> np.ndarray:
    if d.kind == MULTIPLICATIVE:
        return np.log(x / w0)
    if d.kind == ADDITIVE:
        return x - w0
    return np.asarray(d.v(x), dtype=float) - float(d.v(np.float64(w0)))


def _prepare(G: CapitalGame, s: MixedStrategyProfile) -> _Prepared:
    check_profile(G.action_counts, s)
    increments = tuple(_increment(d, G.flat_payoffs(i), G.endowments[i]) for i, d in enumerate(G.dynamics))
    # same rates as time_average_growth, so deterministic games compare exactly
    growth = tuple(G.growth_tensor(i).ravel() for i in range(G.num_players))
    v0 = np.array([float(d.v(np.float64(w))) for d, w in zip(G.dynamics, G.endowments)])
    ranges = [d.v_range for d in G.dynamics]
    cdfs = tuple(np.cumsum(p) for p in s.strategies)
    return _Prepared(cdfs, increments, growth, v0,
                     np.array([r[0] for r in ranges]) - v0, np.array([r[1] for r in ranges]) - v0)


def _draw(rng: np.random.Generator, cdfs: Sequence[np.ndarray], rounds: int) -> np.ndarray:
    """Independent action draws, shape (rounds, players)."""
    u = rng.random((rounds, len(cdfs)))
    acts = np.empty((rounds, len(cdfs)), dtype=np.intp)
    for i, cdf in enumerate(cdfs):
        acts[:, i] = np.minimum(np.searchsorted(cdf, u[:, i], side="right"), cdf.size - 1)
    return acts


def _capital(G: CapitalGame, disp: np.ndarray) -> np.ndarray:
    """Map displacements from v(w0), shape (..., players), back to capital."""
    out = np.empty_like(disp)
    with np.errstate(over="ignore", invalid="ignore"):
        for i, d in enumerate(G.dynamics):
            w0, x = G.endowments[i], disp[..., i]
            if d.kind == MULTIPLICATIVE:
                out[..., i] = w0 * np.exp(x)
            elif d.kind == ADDITIVE:
                out[..., i] = w0 + x
            else:
                out[..., i] = d.v_inverse(float(d.v(np.float64(w0))) + x)
    return out


def step(G: CapitalGame, w_current: Sequence[float], s: MixedStrategyProfile,
         rng: np.random.Generator) -> Step:
    """Play one round from ``w_current`` with payoffs rescaled to the current endowments."""
    prep = _prepare(G, s)
    acts = tuple(int(a) for a in _draw(rng, prep.cdfs, 1)[0])
    k = int(np.ravel_multi_index(acts, G.action_counts))
    new_w, absorbed = [], False
    for i, d in enumerate(G.dynamics):
        if not d.in_domain(w_current[i]):
            raise ValueError(f"current endowment {w_current[i]!r} of player {i} outside {d.name} domain")
        w, x, w0 = float(w_current[i]), float(G.flat_payoffs(i)[k]), G.endowments[i]
        if d.kind == MULTIPLICATIVE:
            new = w * (x / w0)
        elif d.kind == ADDITIVE:
            new = w + (x - w0)
        else:
            v = float(d.v(np.float64(w))) + prep.increments[i][k]
            lo, hi = d.v_range
            new = float(d.v_inverse(np.float64(v))) if lo < v < hi else math.nan
        if not d.in_domain(new):
            absorbed, new = True, math.nan
        new_w.append(new)
    return Step(tuple(new_w), acts, absorbed)


class _Trial(NamedTuple):
    counts: np.ndarray          # profile counts over the whole trial
    final: np.ndarray           # displacement from v(w0)
    at_checkpoints: np.ndarray  # (len(checkpoints), players), NaN after absorption
    absorbed_round: int         # 0 if never absorbed
    actions: np.ndarray | None
    path: np.ndarray | None


def _run_trial(G: CapitalGame, prep: _Prepared, cfg: SimulationConfig, cps: np.ndarray, k: int) -> _Trial:
    T, n = cfg.rounds, G.num_players
    acts = _draw(trial_rng(cfg.seed, k), prep.cdfs, T)
    flat = np.ravel_multi_index(tuple(acts.T), G.action_counts)
    path = np.zeros((T + 1, n))
    for i in range(n):
        np.cumsum(prep.increments[i][flat], out=path[1:, i])
    outside = ~((path > prep.d_lo) & (path < prep.d_hi)).all(axis=1)
    absorbed_round = int(np.argmax(outside)) if outside.any() else 0
    if absorbed_round:
        path[absorbed_round:] = np.nan
    counts = np.bincount(flat, minlength=math.prod(G.action_counts))
    return _Trial(counts, path[-1].copy(), path[cps], absorbed_round,
                  acts if cfg.record_trajectories else None,
                  path if cfg.record_trajectories else None)


def _ensemble_mean(G: CapitalGame, disp: np.ndarray) -> np.ndarray:
    """Mean capital over trials (axis 0), ignoring absorbed (NaN) entries."""
    out = np.full(disp.shape[1:], np.nan)
    caps = _capital(G, disp)
    for i, d in enumerate(G.dynamics):
        di = disp[:, :, i]
        alive = ~np.isnan(di)
        n_alive = alive.sum(axis=0)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if d.kind == MULTIPLICATIVE:
                # log-mean-exp keeps late rounds finite
                lme = np.logaddexp.reduce(np.where(alive, di, -np.inf), axis=0) - np.log(n_alive)
                out[:, i] = G.endowments[i] * np.exp(lme)
            else:
                total = np.where(alive, caps[:, :, i], 0.0).sum(axis=0)
                out[:, i] = np.where(n_alive > 0, total / np.maximum(n_alive, 1), np.nan)
    return out


def _expected_capital(G: CapitalGame, s: MixedStrategyProfile, cps: Sequence[int]) -> np.ndarray:
    """Analytic ensemble mean for additive and multiplicative players (NaN otherwise)."""
    probs = reduce(np.multiply.outer, s.strategies).ravel()
    t = np.asarray(cps, dtype=float)
    out = np.full((len(cps), G.num_players), np.nan)
    for i, d in enumerate(G.dynamics):
        w0, x = G.endowments[i], G.flat_payoffs(i)
        with np.errstate(over="ignore"):
            if d.kind == MULTIPLICATIVE:
                out[:, i] = w0 * float(probs @ (x / w0)) ** t
            elif d.kind == ADDITIVE:
                out[:, i] = w0 + t * float(probs @ (x - w0))
    return out


def run(G: CapitalGame, cfg: SimulationConfig) -> SimulationReport:
    """Run ``cfg.trials`` independent sequences of ``cfg.rounds`` rounds."""
    s = cfg.profile
    prep = _prepare(G, s)
    cps = np.asarray(checkpoint_rounds(cfg.rounds))
    work = lambda k: _run_trial(G, prep, cfg, cps, k)  # noqa: E731
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            trials = list(pool.map(work, range(cfg.trials)))
    else:
        trials = [work(k) for k in range(cfg.trials)]

    n = G.num_players
    alive = [t for t in trials if not t.absorbed_round]
    estimates, errors = [], []
    for i in range(n):
        g = prep.growth[i]
        if alive:
            total = np.sum([t.counts for t in alive], axis=0)
            # frequency-weighted growth equals the mean of (v_T - v_0) / (T dt) over trials
            estimates.append(float((total / (cfg.rounds * len(alive))) @ g))
            per_trial = np.array([(t.counts / cfg.rounds) @ g for t in alive])
            # shifting by one sample leaves the spread unchanged and makes identical trials give exactly 0
            spread = (per_trial - per_trial[0]).std(ddof=1) if len(alive) > 1 else 0.0
            errors.append(float(spread / math.sqrt(len(alive))))
        else:
            estimates.append(math.nan)
            errors.append(math.nan)

    at_cps = np.stack([t.at_checkpoints for t in trials])
    final = _capital(G, np.stack([t.final for t in trials]))
    with np.errstate(invalid="ignore"):
        median = np.nanmedian(_capital(G, at_cps), axis=0) if alive else np.full((len(cps), n), np.nan)
    record = cfg.record_trajectories
    return SimulationReport(
        seed=cfg.seed, rounds=cfg.rounds, trials=cfg.trials, profile=s,
        checkpoints=tuple(int(c) for c in cps),
        time_average_growth_estimate=tuple(estimates),
        standard_error=tuple(errors),
        theoretical_growth=tuple(time_average_growth(G, s, i) for i in range(n)),
        initial_capital=G.endowments,
        ensemble_average_capital=_ensemble_mean(G, at_cps),
        median_capital=median,
        expected_capital=_expected_capital(G, s, cps),
        final_capitals=final,
        absorbed_trials=tuple((k, t.absorbed_round) for k, t in enumerate(trials) if t.absorbed_round),
        realized_actions=np.stack([t.actions for t in trials]) if record else None,
        trajectories=_capital(G, np.stack([t.path for t in trials])) if record else None,
    )


def ergodicity_check(G: CapitalGame, s: MixedStrategyProfile, cfg: SimulationConfig) -> list[ErgodicityResult]:
    """Compare simulated time-average growth with the expected growth rate, per player."""
    report = run(G, replace(cfg, profile=s))
    return [ErgodicityResult(est, th, abs(est - th), se)
            for est, th, se in zip(report.time_average_growth_estimate, report.theoretical_growth,
                                   report.standard_error)]
