import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from capgames import (
    ADDITIVE_DYNAMICS,
    MULTIPLICATIVE_DYNAMICS,
    SQRT_DYNAMICS,
    CapitalGame,
    DomainError,
    Gamble,
    MixedStrategyProfile,
    StandardGame,
    custom_dynamics,
    dynamics_by_name,
    from_standard_game,
    gamble_from_response,
    growth_rate,
    is_positive,
    time_average_growth,
    to_standard_game,
)
from conftest import COIN_FLIP_LOG_GROWTH, LN06, LN15, coin_flip, pd_capital

BUILTINS = [ADDITIVE_DYNAMICS, MULTIPLICATIVE_DYNAMICS]
ALL = BUILTINS + [SQRT_DYNAMICS]


# -- dynamics specs -------------------------------------------------------------

def test_builtin_linearizations():
    assert ADDITIVE_DYNAMICS.v(3.0) == 3.0
    assert MULTIPLICATIVE_DYNAMICS.v(math.e) == pytest.approx(1.0)
    assert MULTIPLICATIVE_DYNAMICS.v_range == (-math.inf, math.inf)
    assert SQRT_DYNAMICS.v_range == (0.0, math.inf)
    assert dynamics_by_name("sqrt") is SQRT_DYNAMICS
    with pytest.raises(KeyError):
        dynamics_by_name("cubic")


def test_custom_dynamics_checks_monotonicity_and_inverse():
    with pytest.raises(ValueError, match="increasing"):
        custom_dynamics("neg", lambda x: -x, lambda y: -y)
    with pytest.raises(ValueError, match="v_inverse"):
        custom_dynamics("bad-inverse", lambda x: 2 * x, lambda y: y)
    cube = custom_dynamics("cube-root", np.cbrt, lambda y: np.asarray(y) ** 3)
    assert cube.kind == "custom"


# -- growth_rate ----------------------------------------------------------------

def test_growth_rate_additive_coin_flip():
    assert growth_rate(ADDITIVE_DYNAMICS, 150.0, 100.0, 1.0) == 50.0


def test_growth_rate_multiplicative_coin_flip():
    assert growth_rate(MULTIPLICATIVE_DYNAMICS, 150.0, 100.0, 1.0) == pytest.approx(LN15, abs=1e-15)
    assert growth_rate(MULTIPLICATIVE_DYNAMICS, 150.0, 100.0, 1.0) == pytest.approx(0.405, abs=5e-4)


@pytest.mark.parametrize("d", ALL)
def test_growth_rate_zero_at_endowment(d):
    assert growth_rate(d, 7.5, 7.5, 3.0) == 0.0


def test_growth_rate_duration_scaling():
    assert growth_rate(MULTIPLICATIVE_DYNAMICS, 150.0, 100.0, 2.0) == pytest.approx(LN15 / 2, abs=1e-15)


@pytest.mark.parametrize("x, w", [(0.0, 100.0), (-1.0, 100.0), (150.0, 0.0)])
def test_growth_rate_domain_errors(x, w):
    with pytest.raises(DomainError) as e:
        growth_rate(MULTIPLICATIVE_DYNAMICS, x, w)
    assert e.value.violations


def test_growth_rate_nonpositive_duration():
    with pytest.raises(ValueError):
        growth_rate(ADDITIVE_DYNAMICS, 1.0, 1.0, 0.0)


@given(st.sampled_from(ALL), st.floats(0.01, 1e4), st.floats(0.01, 1e4), st.floats(0.01, 1e4),
       st.floats(0.1, 10.0))
def test_growth_rate_strictly_increasing(d, w, x1, x2, dt):
    if x1 == x2:
        return
    lo, hi = sorted((x1, x2))
    assert growth_rate(d, lo, w, dt) < growth_rate(d, hi, w, dt)


# -- capital games ------------------------------------------------------------------

def test_capital_game_defaults_and_positivity():
    G = coin_flip()
    assert G.durations == (1.0,)
    assert is_positive(G) and G.is_positive


def test_zero_payoff_is_not_positive():
    G = CapitalGame((2,), ([0.0, 5.0],), (1.0,), ("additive",))
    assert not is_positive(G)


def test_negative_endowment_is_not_positive():
    G = CapitalGame((2,), ([1.0, 5.0],), (-1.0,), ("additive",))
    assert not is_positive(G)


def test_domain_errors_list_every_violation():
    with pytest.raises(DomainError) as e:
        CapitalGame((2, 2), ([1.0, -2.0, 0.0, 4.0], [1.0, 1.0, 1.0, 1.0]), (0.0, 1.0),
                    ("multiplicative", "additive"))
    assert e.value.violations == [(0, None, 0.0), (0, (0, 1), -2.0), (0, (1, 0), 0.0)]
    assert "player 0" in str(e.value)


def test_nonpositive_durations_rejected():
    with pytest.raises(ValueError):
        CapitalGame((2,), ([1.0, 2.0],), (1.0,), ("additive",), durations=(0.0,))


# -- time_average_growth ----------------------------------------------------------

def test_time_average_growth_coin_flip():
    s = MixedStrategyProfile.uniform((2,))
    assert time_average_growth(coin_flip(), s, 0) == pytest.approx(COIN_FLIP_LOG_GROWTH, abs=1e-15)
    assert time_average_growth(coin_flip("additive"), s, 0) == pytest.approx(5.0, abs=1e-12)


def test_time_average_growth_degenerate_profile():
    G = pd_capital(("multiplicative", "additive"))
    for a in [(0, 0), (0, 1), (1, 0), (1, 1)]:
        s = MixedStrategyProfile.pure((2, 2), a)
        for i in range(2):
            k = 2 * a[0] + a[1]
            expected = growth_rate(G.dynamics[i], G.flat_payoffs(i)[k], 10.0)
            assert time_average_growth(G, s, i) == expected


# -- to_standard_game / from_standard_game ----------------------------------------

def test_to_standard_coin_flip():
    assert to_standard_game(coin_flip("additive")).flat_payoffs(0).tolist() == [50.0, -40.0]
    u = to_standard_game(coin_flip("multiplicative")).flat_payoffs(0)
    assert u[0] == pytest.approx(LN15, abs=1e-12) and u[1] == pytest.approx(LN06, abs=1e-12)
    assert (round(u[0], 3), round(u[1], 3)) == (0.405, -0.511)


def test_to_standard_carries_labels():
    g = to_standard_game(coin_flip())
    assert g.player_names == ("gambler",) and g.action_names == (("a1", "a2"),)


def test_to_standard_all_at_endowment_is_zero():
    G = CapitalGame((2, 3), ([4.0] * 6, [9.0] * 6), (4.0, 9.0), ("multiplicative", "sqrt"))
    assert all(np.all(p == 0.0) for p in to_standard_game(G).payoffs)


def test_from_standard_examples():
    zero = StandardGame((2,), ([0.0, 0.0],))
    assert from_standard_game(zero, [100.0], ["multiplicative"]).flat_payoffs(0).tolist() == [100.0, 100.0]
    g = StandardGame((1,), ([LN15],))
    assert from_standard_game(g, [100.0], ["multiplicative"]).flat_payoffs(0)[0] == pytest.approx(150.0, rel=1e-14)
    g = StandardGame((1,), ([50.0],))
    assert from_standard_game(g, [100.0], ["additive"]).flat_payoffs(0)[0] == 150.0


def test_from_standard_additive_may_be_nonpositive():
    g = StandardGame((2,), ([-200.0, 1.0],))
    G = from_standard_game(g, [100.0], ["additive"])
    assert not G.is_positive
    with pytest.raises(DomainError):
        G.with_dynamics(["multiplicative"])


def test_from_standard_rejects_nonpositive_endowment():
    with pytest.raises(ValueError):
        from_standard_game(StandardGame((1,), ([1.0],)), [0.0], ["additive"])


def test_from_standard_sqrt_out_of_range():
    # sqrt(w) + u < 0 has no preimage
    with pytest.raises(DomainError):
        from_standard_game(StandardGame((1,), ([-20.0],)), [100.0], ["sqrt"])


def test_from_standard_with_duration():
    g = StandardGame((2,), ([1.0, -1.0],))
    G = from_standard_game(g, [10.0], ["additive"], durations=[2.0])
    assert G.flat_payoffs(0).tolist() == [12.0, 8.0]
    assert to_standard_game(G).flat_payoffs(0).tolist() == [1.0, -1.0]


@st.composite
def standard_games(draw):
    n = draw(st.integers(1, 3))
    counts = tuple(draw(st.lists(st.integers(1, 3), min_size=n, max_size=n)))
    size = math.prod(counts)
    elems = st.floats(-5.0, 5.0, allow_nan=False)
    return StandardGame(counts, tuple(draw(arrays(np.float64, size, elements=elems)) for _ in range(n)))


@given(standard_games(), st.data())
def test_round_trip_standard_capital_standard(g, data):
    n = g.num_players
    w = data.draw(st.lists(st.floats(0.1, 1e3), min_size=n, max_size=n))
    dyn = data.draw(st.lists(st.sampled_from(BUILTINS), min_size=n, max_size=n))
    back = to_standard_game(from_standard_game(g, w, dyn))
    for a, b in zip(g.payoffs, back.payoffs):
        np.testing.assert_allclose(b, a, rtol=0, atol=1e-9)


@given(st.data())
def test_round_trip_capital_standard_capital(data):
    n = data.draw(st.integers(1, 3))
    counts = tuple(data.draw(st.lists(st.integers(1, 3), min_size=n, max_size=n)))
    size = math.prod(counts)
    pos = st.floats(0.1, 10.0)
    payoffs = tuple(data.draw(arrays(np.float64, size, elements=pos)) for _ in range(n))
    w = data.draw(st.lists(pos, min_size=n, max_size=n))
    dt = data.draw(st.lists(st.floats(0.5, 3.0), min_size=n, max_size=n))
    dyn = data.draw(st.lists(st.sampled_from(ALL), min_size=n, max_size=n))
    G = CapitalGame(counts, payoffs, w, dyn, dt)
    H = from_standard_game(to_standard_game(G), w, dyn, dt)
    for a, b in zip(G.payoffs, H.payoffs):
        np.testing.assert_allclose(b, a, rtol=1e-9)


@given(st.data())
def test_endowment_term_does_not_change_argmax(data):
    counts = (3, 2)
    pos = st.floats(0.1, 10.0)
    payoffs = tuple(data.draw(arrays(np.float64, 6, elements=pos)) for _ in range(2))
    d = data.draw(st.sampled_from(ALL))
    w1, w2 = data.draw(pos), data.draw(pos)
    opp = data.draw(arrays(np.float64, 2, elements=st.floats(0.01, 1.0)))
    opp = opp / opp.sum()
    values = []
    for w in (w1, w2):
        G = CapitalGame(counts, payoffs, (w, 1.0), (d, "additive"))
        values.append([time_average_growth(G, MixedStrategyProfile((np.eye(3)[a], opp)), 0) for a in range(3)])
    diffs = np.array(values[0]) - np.array(values[1])
    # a strategy-independent shift only
    np.testing.assert_allclose(diffs, diffs[0], atol=1e-9)
    assert np.argmax(values[0]) == np.argmax(values[1]) or \
        np.sort(values[0])[-1] - np.sort(values[0])[-2] < 1e-9


# -- gambles -------------------------------------------------------------------------

def test_gamble_coin_flip():
    G = coin_flip()
    gamble = gamble_from_response(G, 0, np.array([0.5, 0.5]), [])
    assert gamble == Gamble(((150.0, 0.5), (60.0, 0.5)), 1.0)
    assert gamble.growth_rate(MULTIPLICATIVE_DYNAMICS, 100.0) == pytest.approx(COIN_FLIP_LOG_GROWTH, abs=1e-15)


def test_gamble_degenerate():
    G = pd_capital()
    gamble = gamble_from_response(G, 1, np.array([0.0, 1.0]), [np.array([1.0, 0.0])])
    assert gamble.outcomes == ((50.0, 1.0),)


def test_gamble_merges_equal_values():
    G = CapitalGame((2, 2), ([5.0, 5.0, 7.0, 1.0], [1.0] * 4), (1.0, 1.0), ("additive", "additive"))
    gamble = gamble_from_response(G, 0, np.array([1.0, 0.0]), [np.array([0.25, 0.75])])
    assert gamble.outcomes == ((5.0, 1.0),)
    gamble = gamble_from_response(G, 1, np.array([0.5, 0.5]), [np.array([0.5, 0.5])])
    assert gamble.outcomes == ((1.0, 1.0),)


def test_gamble_validation():
    with pytest.raises(ValueError):
        Gamble(((1.0, 0.5),), 1.0)
    with pytest.raises(ValueError):
        Gamble(((1.0, 1.0),), 0.0)


@given(st.data())
def test_gamble_probabilities_sum_to_one(data):
    G = pd_capital(("additive", "sqrt"))
    s1 = data.draw(arrays(np.float64, 2, elements=st.floats(0.0, 1.0)))
    s2 = data.draw(arrays(np.float64, 2, elements=st.floats(0.0, 1.0)))
    if s1.sum() == 0 or s2.sum() == 0:
        return
    gamble = gamble_from_response(G, 0, s1 / s1.sum(), [s2 / s2.sum()])
    assert abs(sum(gamble.probabilities) - 1.0) <= 1e-9
    # the gamble's growth is the player's time-average growth
    s = MixedStrategyProfile((s1 / s1.sum(), s2 / s2.sum()))
    assert gamble.growth_rate(G.dynamics[0], 10.0) == pytest.approx(time_average_growth(G, s, 0), abs=1e-9)
