"""Solvers for the finite Benaloh cast-or-audit inspection game."""

from benaloh.exceptions import (
    BenalohError,
    DegenerateTailError,
    InvalidArgumentError,
    NoInteriorEquilibriumError,
    ResidualProbabilityError,
    UnsupportedHorizonError,
)
from benaloh.game_model import (
    NEVER,
    DeviceMixedStrategy,
    GameParams,
    PayoffPair,
    VoterBehavioralStrategy,
    VoterMixedStrategy,
    behavioral_to_mixed,
    expected_payoffs,
    mixed_to_behavioral,
    payoff,
)
from benaloh.nash import (
    NashSolution,
    approx_behavioral,
    nash_device,
    nash_solution,
    nash_voter_behavioral,
    nash_voter_mixed,
    verify_equilibrium,
)
from benaloh.simulator import SimConfig, SimResult, simulate, simulate_equivalence
from benaloh.stackelberg import (
    BestResponseSet,
    StackelbergReport,
    best_response_device,
    compare_nash_stackelberg,
    epsilon_optimal,
    stackelberg_value,
    utility_vs_best_response,
)

__version__ = "0.1.0"
