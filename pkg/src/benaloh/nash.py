"""Closed-form Nash equilibria of the finite Benaloh game."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from benaloh.exceptions import NoInteriorEquilibriumError
from benaloh.game_model import (
    DeviceMixedStrategy,
    GameParams,
    PayoffPair,
    VoterBehavioralStrategy,
    VoterMixedStrategy,
    device_round_payoffs,
    expected_payoffs,
    payoff_matrices,
    voter_round_payoffs,
)

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class NashSolution:
    s_V: VoterMixedStrategy
    b_V: VoterBehavioralStrategy
    s_D: DeviceMixedStrategy
    Eu: PayoffPair
    R: float

    def to_dict(self) -> dict:
        return {
            "s_V": self.s_V.to_list(),
            "b_V": self.b_V.to_list(),
            "s_D": self.s_D.to_dict(),
            "Eu": {"u_V": self.Eu.u_V, "u_D": self.Eu.u_D},
            "R": self.R,
        }


@dataclass(frozen=True)
class EquilibriumCheck:
    """Outcome of :func:`verify_equilibrium`.

    ``voter_gain`` and ``device_gain`` are the largest improvements a player
    can get from a pure deviation; the residuals measure how far each
    player's pure payoffs (over the support rounds ``1..n_max``) are from
    being equal.
    """

    is_equilibrium: bool
    voter_gain: float
    device_gain: float
    voter_residual: float
    device_residual: float

    @property
    def max_gain(self) -> float:
        return max(self.voter_gain, self.device_gain)

    def __bool__(self) -> bool:
        return self.is_equilibrium


def nash_voter_mixed(params: GameParams) -> VoterMixedStrategy:
    """Unique equilibrium casting distribution, geometric with ratio ``R``.

    ``p_n = (1 - R) R^(n-1) / (1 - R^n_max)``.
    """
    r = params.ratio
    n = np.arange(params.n_max)
    probs = (1.0 - r) * r**n / (1.0 - r**params.n_max)
    return VoterMixedStrategy(tuple(probs))


def nash_voter_behavioral(params: GameParams) -> VoterBehavioralStrategy:
    """Equilibrium per-round casting probabilities ``(1 - R) / (1 - R^(n_max-n+1))``."""
    r = params.ratio
    remaining = params.n_max - np.arange(params.n_max)
    probs = (1.0 - r) / (1.0 - r**remaining)
    probs[-1] = 1.0
    return VoterBehavioralStrategy(tuple(probs))


def approx_behavioral(params: GameParams) -> VoterBehavioralStrategy:
    """Constant-rate recipe: cast with ``afail_D / (asucc_D + afail_D)`` before the last round."""
    rate = params.afail_D / (params.asucc_D + params.afail_D)
    return VoterBehavioralStrategy((rate,) * (params.n_max - 1) + (1.0,))


def nash_device(params: GameParams) -> DeviceMixedStrategy:
    """Device equilibrium strategy from the voter's indifference conditions.

    Solves ``u_V(n + 1, s_D) = u_V(n, s_D)`` for ``n < n_max`` together with
    ``sum(s_D) = 1``, never-cheat mass fixed at zero.

    Raises:
        NoInteriorEquilibriumError: if the system is singular or its solution
            leaves the open simplex.
    """
    n = params.n_max
    u_v, _ = payoff_matrices(params)
    u_v = u_v[:, :n]
    a = np.empty((n, n))
    a[: n - 1] = u_v[1:] - u_v[:-1]
    a[n - 1] = 1.0
    b = np.zeros(n)
    b[n - 1] = 1.0
    try:
        probs = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise NoInteriorEquilibriumError(f"indifference system is singular: {exc}") from None
    if not np.all(np.isfinite(probs)) or np.any(probs <= 0.0) or (n > 1 and np.any(probs >= 1.0)):
        raise NoInteriorEquilibriumError(f"indifference solution {probs.tolist()} is not interior")
    probs = probs / probs.sum()
    return DeviceMixedStrategy(tuple(probs), 0.0)


def verify_equilibrium(
    s_V: VoterMixedStrategy,
    s_D: DeviceMixedStrategy,
    params: GameParams,
    tol: float = DEFAULT_TOL,
) -> EquilibriumCheck:
    """Check that no pure deviation gains either player more than ``tol``.

    A best response to a fixed mixed strategy is always attained at a pure
    strategy, so checking the ``n_max`` voter rounds and the ``n_max + 1``
    device rounds (never-cheat included) is enough.
    """
    eu = expected_payoffs(s_V, s_D, params)
    voter = voter_round_payoffs(s_D, params)
    device = device_round_payoffs(s_V, params)
    voter_gain = float(voter.max() - eu.u_V)
    device_gain = float(device.max() - eu.u_D)
    n = params.n_max
    return EquilibriumCheck(
        is_equilibrium=voter_gain <= tol and device_gain <= tol,
        voter_gain=voter_gain,
        device_gain=device_gain,
        voter_residual=float(np.ptp(voter)),
        device_residual=float(np.ptp(device[:n])),
    )


def nash_solution(params: GameParams) -> NashSolution:
    """Voter and device equilibrium strategies with their expected payoffs."""
    s_V = nash_voter_mixed(params)
    s_D = nash_device(params)
    check = verify_equilibrium(s_V, s_D, params)
    if not check:
        raise NoInteriorEquilibriumError(
            f"closed-form profile fails verification (max gain {check.max_gain:.3e})"
        )
    return NashSolution(
        s_V=s_V,
        b_V=nash_voter_behavioral(params),
        s_D=s_D,
        Eu=expected_payoffs(s_V, s_D, params),
        R=params.ratio,
    )
