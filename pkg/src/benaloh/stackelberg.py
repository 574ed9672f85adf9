"""Voter-as-leader analysis of the two-round Benaloh game.

With ``n_max = 2`` the voter's strategy is the probability ``p_V`` of casting
in round 1 and the device's strategy is the probability ``p_D`` of cheating
in round 1 (it cheats in round 2 otherwise).
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from benaloh.exceptions import InvalidArgumentError, UnsupportedHorizonError
from benaloh.game_model import GameParams
from benaloh.nash import nash_solution


class BestResponseSet(enum.Enum):
    ONLY_HONEST_FIRST = "only_honest_first"  # p_D = 0
    ONLY_CHEAT_FIRST = "only_cheat_first"  # p_D = 1
    FULL_INTERVAL = "full_interval"  # any p_D in [0, 1]

    def contains(self, p_D: float) -> bool:
        if self is BestResponseSet.FULL_INTERVAL:
            return 0.0 <= p_D <= 1.0
        return p_D == (1.0 if self is BestResponseSet.ONLY_CHEAT_FIRST else 0.0)


class EpsilonOptimal(NamedTuple):
    p_V: float
    guaranteed: float


@dataclass(frozen=True)
class StackelbergReport:
    sval: float
    p_V_NE: float
    nash_Eu_V: float
    epsilon: float
    p_V_eps: float
    Eu_V_eps: float

    def to_dict(self) -> dict:
        return asdict(self)


def _require_two_rounds(params: GameParams) -> None:
    if params.n_max != 2:
        raise UnsupportedHorizonError(
            f"Stackelberg analysis is only defined for n_max = 2, got n_max = {params.n_max}"
        )


def _check_prob(p: float, name: str) -> None:
    if not 0.0 <= p <= 1.0:
        raise InvalidArgumentError(f"{name} must lie in [0, 1], got {p!r}")


def nash_first_round_cast(params: GameParams) -> float:
    """``(asucc_D + afail_D) / (2 asucc_D + afail_D)``: where the device is indifferent."""
    return (params.asucc_D + params.afail_D) / (2.0 * params.asucc_D + params.afail_D)


def upper_branch_slope(params: GameParams) -> float:
    """Slope of the voter's payoff against an honest-first device."""
    return params.asucc_V + params.afail_V + params.c_audit


def best_response_device(p_V: float, params: GameParams) -> BestResponseSet:
    _require_two_rounds(params)
    _check_prob(p_V, "p_V")
    p_ne = nash_first_round_cast(params)
    if p_V < p_ne:
        return BestResponseSet.ONLY_HONEST_FIRST
    if p_V > p_ne:
        return BestResponseSet.ONLY_CHEAT_FIRST
    return BestResponseSet.FULL_INTERVAL


def utility_vs_best_response(p_V: float, params: GameParams) -> float:
    """Voter's guaranteed utility when the device best-responds to ``p_V``.

    At the indifference point the device may pick anything, and the voter is
    credited with the worst case (the device cheating first).
    """
    _require_two_rounds(params)
    _check_prob(p_V, "p_V")
    if p_V < nash_first_round_cast(params):
        return p_V * params.asucc_V - (1.0 - p_V) * (params.c_audit + params.afail_V)
    return -p_V * params.afail_V - (1.0 - p_V) * params.c_audit


def utility_vs_best_response_grid(p_V: np.ndarray, params: GameParams) -> np.ndarray:
    """Vectorised :func:`utility_vs_best_response`."""
    _require_two_rounds(params)
    p = np.asarray(p_V, dtype=float)
    upper = p * params.asucc_V - (1.0 - p) * (params.c_audit + params.afail_V)
    lower = -p * params.afail_V - (1.0 - p) * params.c_audit
    return np.where(p < nash_first_round_cast(params), upper, lower)


def stackelberg_value(params: GameParams) -> float:
    """Supremum of the voter's guaranteed utility; never attained."""
    _require_two_rounds(params)
    a_d, f_d = params.asucc_D, params.afail_D
    numer = a_d * (params.asucc_V - params.afail_V - params.c_audit) + f_d * params.asucc_V
    return numer / (2.0 * a_d + f_d)


def epsilon_optimal(params: GameParams, epsilon: float) -> EpsilonOptimal:
    """A first-round cast probability guaranteeing at least ``SVal - epsilon``.

    Steps back from the indifference point along the linear upper branch by
    ``epsilon / slope``, but never more than half way to zero.
    """
    _require_two_rounds(params)
    if not (epsilon > 0 and math.isfinite(epsilon)):
        raise InvalidArgumentError(f"epsilon must be a positive finite number, got {epsilon!r}")
    p_ne = nash_first_round_cast(params)
    sval = stackelberg_value(params)
    delta = min(epsilon / upper_branch_slope(params), p_ne / 2.0)
    p_V = p_ne - delta
    guaranteed = utility_vs_best_response(p_V, params)
    # float rounding can land a hair below the target; creep towards p_ne
    while guaranteed < sval - epsilon:
        nxt = float(np.nextafter(p_V, p_ne))
        if nxt >= p_ne:
            break
        p_V = nxt
        guaranteed = utility_vs_best_response(p_V, params)
    return EpsilonOptimal(p_V, guaranteed)


def compare_nash_stackelberg(params: GameParams, epsilon: float = 0.01) -> StackelbergReport:
    """Stackelberg value next to the Nash payoff and an epsilon-optimal strategy."""
    _require_two_rounds(params)
    sval = stackelberg_value(params)
    nash_eu_v = nash_solution(params).Eu.u_V
    p_eps, eu_eps = epsilon_optimal(params, epsilon)
    if not sval > nash_eu_v:
        raise ArithmeticError(f"Stackelberg value {sval} does not exceed the Nash payoff {nash_eu_v}")
    return StackelbergReport(
        sval=sval,
        p_V_NE=nash_first_round_cast(params),
        nash_Eu_V=nash_eu_v,
        epsilon=epsilon,
        p_V_eps=p_eps,
        Eu_V_eps=eu_eps,
    )
