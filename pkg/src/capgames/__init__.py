"""Capital games: growth equilibria and their correspondence with Nash equilibria."""
from .dynamics import (
    ADDITIVE_DYNAMICS,
    MULTIPLICATIVE_DYNAMICS,
    SQRT_DYNAMICS,
    CapitalGame,
    DomainError,
    DynamicsSpec,
    Gamble,
    custom_dynamics,
    dynamics_by_name,
    from_standard_game,
    gamble_from_response,
    growth_rate,
    is_positive,
    register_dynamics,
    time_average_growth,
    to_standard_game,
)
from .game import (
    MixedStrategyProfile,
    ShapeError,
    StandardGame,
    best_response_set,
    expected_utility,
    is_nash,
    profile_probability,
    regret,
)
from .simulate import SimulationConfig, SimulationReport, ergodicity_check, run, step
from .solvers import (
    EquilibriumResult,
    enumerate_pure_growth_equilibria,
    enumerate_pure_nash,
    growth_equilibria,
    support_enumeration_2p,
    verify_growth_equilibrium,
)

__version__ = "0.1.0"
