"""JSON codec for game files, strategy profiles, equilibria and reports.

A game file looks like::

    {
      "schema_version": 1,
      "kind": "capital",
      "players": ["gambler"],
      "actions": [["heads", "tails"]],
      "payoffs": [[150, 60]],
      "endowments": [100],
      "durations": [1],
      "dynamics": ["multiplicative"]
    }

``payoffs[i]`` is player i's flat payoff array with the last player's action
varying fastest. ``dynamics`` entries are ``"additive"``, ``"multiplicative"``
or ``{"custom": name}`` for a registered spec. Standard games omit the last
three fields. Output is canonical: sorted keys, floats with 17 significant
digits, non-finite floats as null.
"""
from __future__ import annotations

import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .dynamics import CUSTOM, REGISTRY, CapitalGame, DomainError, dynamics_by_name
from .game import MixedStrategyProfile, StandardGame, num_profiles

SCHEMA_VERSION = 1
STANDARD = "standard"
CAPITAL = "capital"

_COMMON_KEYS = {"schema_version", "kind", "players", "actions", "payoffs"}
_CAPITAL_KEYS = _COMMON_KEYS | {"endowments", "durations", "dynamics"}


class GameFileError(ValueError):
    """Malformed or invalid document; ``errors`` holds ``(field path, message)`` pairs."""

    def __init__(self, errors: Sequence[tuple[str, str]]):
        self.errors = list(errors)
        super().__init__("\n".join(f"{path or '<document>'}: {msg}" for path, msg in self.errors))


# -- reading -----------------------------------------------------------------

def _reject_constant(name):
    raise ValueError(f"non-finite number {name} is not allowed")


def read_text(source) -> str:
    if source == "-":
        return sys.stdin.read()
    if hasattr(source, "read"):
        return source.read()
    return Path(source).read_text()


def loads(text: str) -> Any:
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as e:
        raise GameFileError([("", f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}")]) from None
    except ValueError as e:
        raise GameFileError([("", str(e))]) from None


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _number_list(doc: dict, key: str, n: int, errors: list) -> list[float] | None:
    value = doc[key]
    if not isinstance(value, list) or len(value) != n:
        errors.append((key, f"expected a list of {n} numbers"))
        return None
    bad = [k for k, x in enumerate(value) if not _is_number(x)]
    for k in bad:
        errors.append((f"{key}[{k}]", f"expected a finite number, got {value[k]!r}"))
    return None if bad else [float(x) for x in value]


def _parse_dynamics(entry, path: str, errors: list):
    if isinstance(entry, str) and entry in ("additive", "multiplicative"):
        return entry
    if isinstance(entry, dict) and set(entry) == {"custom"}:
        name = entry["custom"]
        if isinstance(name, str) and name in REGISTRY:
            return REGISTRY[name]
        errors.append((f"{path}.custom", f"unknown custom dynamics {name!r}; registered: {sorted(REGISTRY)}"))
        return None
    errors.append((path, 'expected "additive", "multiplicative" or {"custom": name}'))
    return None


def game_from_document(doc: Any) -> StandardGame | CapitalGame:
    """Validate a parsed document, reporting every problem at once."""
    if not isinstance(doc, dict):
        raise GameFileError([("", "expected a JSON object")])
    errors: list[tuple[str, str]] = []
    kind = doc.get("kind")
    if kind not in (STANDARD, CAPITAL):
        errors.append(("kind", f'expected "standard" or "capital", got {kind!r}'))
    allowed = _CAPITAL_KEYS if kind == CAPITAL else _COMMON_KEYS
    for key in sorted(set(doc) - allowed):
        errors.append((key, "unknown field"))
    required = ["schema_version", "actions", "payoffs"] + (["endowments", "dynamics"] if kind == CAPITAL else [])
    for key in required:
        if key not in doc:
            errors.append((key, "missing required field"))
    if "schema_version" in doc and doc["schema_version"] != SCHEMA_VERSION:
        errors.append(("schema_version", f"unsupported version {doc['schema_version']!r}, expected {SCHEMA_VERSION}"))

    counts = actions = None
    if "actions" in doc:
        acts = doc["actions"]
        if not isinstance(acts, list) or not acts:
            errors.append(("actions", "expected a non-empty list of per-player action name lists"))
        else:
            ok = True
            for i, a in enumerate(acts):
                if not isinstance(a, list) or not a or not all(isinstance(x, str) for x in a):
                    errors.append((f"actions[{i}]", "expected a non-empty list of action names"))
                    ok = False
            if ok:
                actions = tuple(tuple(a) for a in acts)
                counts = tuple(len(a) for a in acts)
    n = len(counts) if counts else None

    players = None
    if "players" in doc:
        p = doc["players"]
        if not isinstance(p, list) or not all(isinstance(x, str) for x in p):
            errors.append(("players", "expected a list of names"))
        elif n is not None and len(p) != n:
            errors.append(("players", f"expected {n} names, got {len(p)}"))
        else:
            players = tuple(p)

    payoffs = None
    if "payoffs" in doc and n is not None:
        pay = doc["payoffs"]
        size = num_profiles(counts)
        if not isinstance(pay, list) or len(pay) != n:
            errors.append(("payoffs", f"expected {n} flat payoff arrays"))
        else:
            payoffs = []
            for i, row in enumerate(pay):
                if not isinstance(row, list) or len(row) != size:
                    errors.append((f"payoffs[{i}]", f"expected {size} numbers"))
                    payoffs = None
                    continue
                for k, x in enumerate(row):
                    if not _is_number(x):
                        errors.append((f"payoffs[{i}][{k}]", f"expected a finite number, got {x!r}"))
                        payoffs = None
                if payoffs is not None:
                    payoffs.append(np.array(row, dtype=float))

    endowments = durations = dynamics = None
    if kind == CAPITAL and n is not None:
        if "endowments" in doc:
            endowments = _number_list(doc, "endowments", n, errors)
        if "durations" in doc:
            durations = _number_list(doc, "durations", n, errors)
            for k, t in enumerate(durations or []):
                if t <= 0:
                    errors.append((f"durations[{k}]", f"duration must be positive, got {t!r}"))
        else:
            durations = [1.0] * n
        if "dynamics" in doc:
            dyn = doc["dynamics"]
            if not isinstance(dyn, list) or len(dyn) != n:
                errors.append(("dynamics", f"expected {n} dynamics entries"))
            else:
                dynamics = [_parse_dynamics(d, f"dynamics[{i}]", errors) for i, d in enumerate(dyn)]

    if kind == CAPITAL and dynamics is not None:
        # domain checks for every player whose fields parsed, alongside the structural errors
        for i, entry in enumerate(dynamics):
            if entry is None:
                continue
            d = dynamics_by_name(entry)
            if endowments is not None and not d.in_domain(endowments[i]):
                errors.append(_violation_path(counts, (i, None, endowments[i]), d.name))
            if payoffs is not None:
                for k in np.flatnonzero(~d.in_domain(payoffs[i])):
                    prof = tuple(int(a) for a in np.unravel_index(k, counts))
                    errors.append(_violation_path(counts, (i, prof, float(payoffs[i][k])), d.name))

    if errors:
        raise GameFileError(errors)
    if kind == STANDARD:
        return StandardGame(counts, tuple(payoffs), players, actions)
    try:
        return CapitalGame(counts, tuple(payoffs), tuple(endowments), tuple(dynamics), tuple(durations),
                           players, actions)
    except DomainError as e:
        raise GameFileError([_violation_path(counts, v, dynamics_by_name(dynamics[v[0]]).name)
                             for v in e.violations]) from None


def _violation_path(counts, violation, dyn_name: str) -> tuple[str, str]:
    i, prof, value = violation
    if prof is None:
        return f"endowments[{i}]", f"{value!r} outside the {dyn_name} dynamics domain"
    k = int(np.ravel_multi_index(prof, counts))
    return f"payoffs[{i}][{k}]", f"{value!r} at profile {list(prof)} outside the {dyn_name} dynamics domain"


def parse_game(source) -> StandardGame | CapitalGame:
    """Read and validate a game file (path, open stream, or ``"-"`` for stdin)."""
    return game_from_document(loads(read_text(source)))


# -- writing -----------------------------------------------------------------

def _dynamics_entry(d):
    return {"custom": d.name} if d.kind == CUSTOM else d.kind


def game_to_document(game: StandardGame | CapitalGame) -> dict:
    n = game.num_players
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": CAPITAL if isinstance(game, CapitalGame) else STANDARD,
        "players": list(game.player_names or (f"P{i + 1}" for i in range(n))),
        "actions": [list(a) for a in (game.action_names or
                                      [[f"a{j + 1}" for j in range(m)] for m in game.action_counts])],
        "payoffs": [game.flat_payoffs(i).tolist() for i in range(n)],
    }
    if isinstance(game, CapitalGame):
        doc["endowments"] = list(game.endowments)
        doc["durations"] = list(game.durations)
        doc["dynamics"] = [_dynamics_entry(d) for d in game.dynamics]
    return doc


def _format(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_format(obj[k], indent, level + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(x, (dict, list, tuple)) for x in obj):
            return "[" + ", ".join(_format(x, indent, level + 1) for x in obj) + "]"
        return "[\n" + ",\n".join(pad + _format(x, indent, level + 1) for x in obj) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return "null"
        return format(x, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    """Canonical, byte-stable JSON text (sorted keys, 17 significant digits)."""
    return _format(obj, 2, 0) + "\n"


def write_text(text: str, dest) -> None:
    if dest is None or dest == "-":
        sys.stdout.write(text)
    else:
        Path(dest).write_text(text)


# -- profiles and results ------------------------------------------------------

def profile_from_json(obj: Any, action_counts: Sequence[int]) -> MixedStrategyProfile:
    """Accept ``[[p...], ...]`` probabilities, ``[a, b, ...]`` pure actions, or ``{"profile": ...}``."""
    if isinstance(obj, dict) and "profile" in obj:
        obj = obj["profile"]
    if not isinstance(obj, list) or len(obj) != len(action_counts):
        raise GameFileError([("profile", f"expected {len(action_counts)} per-player entries")])
    if all(isinstance(a, int) and not isinstance(a, bool) for a in obj):
        try:
            return MixedStrategyProfile.pure(action_counts, obj)
        except ValueError as e:
            raise GameFileError([("profile", str(e))]) from None
    errors = []
    for i, (s, m) in enumerate(zip(obj, action_counts)):
        if not isinstance(s, list) or len(s) != m or not all(_is_number(x) for x in s):
            errors.append((f"profile[{i}]", f"expected {m} probabilities"))
    if errors:
        raise GameFileError(errors)
    try:
        return MixedStrategyProfile(tuple(np.array(s, dtype=float) for s in obj))
    except ValueError as e:
        raise GameFileError([("profile", str(e))]) from None


def profiles_from_json(obj: Any, action_counts: Sequence[int]) -> list[MixedStrategyProfile]:
    """A single profile, or every profile of an equilibria document."""
    if isinstance(obj, dict) and obj.get("kind") == "equilibria":
        return [profile_from_json(e, action_counts) for e in obj.get("equilibria", [])]
    return [profile_from_json(obj, action_counts)]


def result_to_json(r) -> dict:
    return {
        "profile": r.profile.tolist(),
        "classification": r.classification,
        "per_player_regret": list(r.per_player_regret),
        "source": r.source,
    }


def equilibria_to_document(results, game_kind: str, method: str, coverage: str, eps: float,
                           notice: str | None = None) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "equilibria",
        "game_kind": game_kind,
        "method": method,
        "coverage": coverage,
        "eps": eps,
        "equilibria": [result_to_json(r) for r in results],
    }
    if notice:
        doc["notice"] = notice
    return doc


def write_trajectories_csv(report, dest) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["round", "trial", "player", "capital"])
    for t, k, i, c in report.trajectory_rows():
        w.writerow([t, k, i, format(c, ".17g")])
    write_text(buf.getvalue(), dest)
