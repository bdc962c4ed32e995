import math

import numpy as np
import pytest

from capgames import CapitalGame, StandardGame

_ACCEPTANCE = []


@pytest.fixture
def criterion():
    """Record one acceptance line, then assert it."""
    def record(number, name, ok, detail=""):
        _ACCEPTANCE.append((number, name, bool(ok), detail))
        assert ok, f"criterion {number} ({name}) failed: {detail}"
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, ok, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number}. {name}: {detail}")


# utilities from the prisoner's dilemma, row player first; (C, D) = actions (0, 1)
PD_ROW = [[3.0, 0.0], [5.0, 1.0]]
PD_COL = [[3.0, 5.0], [0.0, 1.0]]
MP_ROW = [[1.0, -1.0], [-1.0, 1.0]]

LN15 = 0.4054651081081644
LN06 = -0.5108256237659907
COIN_FLIP_LOG_GROWTH = -0.05268025782891317


@pytest.fixture
def pd_game():
    return StandardGame.from_arrays(PD_ROW, PD_COL, player_names=("row", "col"),
                                    action_names=(("C", "D"), ("C", "D")))


@pytest.fixture
def mp_game():
    return StandardGame.from_arrays(MP_ROW, -np.asarray(MP_ROW))


def coin_flip(dynamics="multiplicative"):
    return CapitalGame((2,), ([150.0, 60.0],), (100.0,), (dynamics,),
                       player_names=("gambler",), action_names=(("a1", "a2"),))


def pd_capital(dynamics=("multiplicative", "multiplicative")):
    # CC, CD, DC, DD in canonical order
    return CapitalGame((2, 2), ([30.0, 5.0, 50.0, 10.0], [30.0, 50.0, 5.0, 10.0]), (10.0, 10.0), dynamics)


def random_positive_capital_game(rng, n, max_actions=3, dyn_choices=("additive", "multiplicative", "sqrt")):
    counts = tuple(int(m) for m in rng.integers(1, max_actions + 1, size=n))
    size = math.prod(counts)
    payoffs = tuple(rng.uniform(0.1, 10.0, size) for _ in range(n))
    endowments = tuple(rng.uniform(0.1, 10.0, n))
    dynamics = tuple(dyn_choices[k] for k in rng.integers(0, len(dyn_choices), n))
    return CapitalGame(counts, payoffs, endowments, dynamics)


def random_profile(rng, counts):
    from capgames import MixedStrategyProfile
    return MixedStrategyProfile(tuple(rng.dirichlet(np.ones(m)) for m in counts))
