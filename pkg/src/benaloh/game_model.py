"""Benaloh inspection game: parameters, strategies and payoffs.

The voter picks the round ``n_cast`` in which she casts her ballot (auditing
in every earlier round); the device picks the round ``n_cheat`` in which it
first fakes the encryption, or never cheats (``n_cheat = inf``).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Any, NamedTuple, Sequence

import jsonschema
import numpy as np

from benaloh.exceptions import (
    DegenerateTailError,
    InvalidArgumentError,
    ResidualProbabilityError,
)

NEVER = math.inf
"""Device round meaning "always encrypt truthfully"."""

MAX_HORIZON = 64
PROB_TOL = 1e-9

_UTILITY_KEYS = ("asucc_V", "afail_V", "asucc_D", "afail_D", "c_audit")

GAME_PARAMS_SCHEMA: dict[str, Any] = {
    "type": "object",
    "properties": {
        **{key: {"type": "number", "exclusiveMinimum": 0} for key in _UTILITY_KEYS},
        "n_max": {"type": "integer", "minimum": 1, "maximum": MAX_HORIZON},
    },
    "required": [*_UTILITY_KEYS, "n_max"],
    "additionalProperties": False,
}


@dataclass(frozen=True)
class GameParams:
    """Payoff parameters and horizon of a finite Benaloh game.

    Attributes:
        asucc_V: voter's reward for casting the vote as intended.
        afail_V: voter's loss when her vote is manipulated.
        asucc_D: device's reward for a successful manipulation.
        afail_D: device's penalty for being caught cheating.
        c_audit: cost of a single audit.
        n_max: number of rounds; the voter must cast in round ``n_max``.
    """

    asucc_V: float
    afail_V: float
    asucc_D: float
    afail_D: float
    c_audit: float
    n_max: int

    def __post_init__(self) -> None:
        for key in _UTILITY_KEYS:
            value = getattr(self, key)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise InvalidArgumentError(f"{key} must be a real number, got {value!r}")
            if not math.isfinite(value) or value <= 0:
                raise InvalidArgumentError(f"{key} must be > 0, got {value!r}")
            object.__setattr__(self, key, float(value))
        if self.c_audit >= self.afail_V:
            raise InvalidArgumentError("c_audit must be < afail_V")
        if isinstance(self.n_max, bool) or not isinstance(self.n_max, (int, np.integer)):
            raise InvalidArgumentError(f"n_max must be an integer, got {self.n_max!r}")
        if not 1 <= self.n_max <= MAX_HORIZON:
            raise InvalidArgumentError(f"n_max must be in [1, {MAX_HORIZON}], got {self.n_max}")
        object.__setattr__(self, "n_max", int(self.n_max))

    @property
    def ratio(self) -> float:
        """Geometric ratio ``asucc_D / (asucc_D + afail_D)`` of the voter's NE."""
        return self.asucc_D / (self.asucc_D + self.afail_D)

    def with_horizon(self, n_max: int) -> GameParams:
        return GameParams(**{**asdict(self), "n_max": n_max})

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> GameParams:
        try:
            jsonschema.validate(data, GAME_PARAMS_SCHEMA)
        except jsonschema.ValidationError as exc:
            where = ".".join(str(p) for p in exc.absolute_path) or "params"
            raise InvalidArgumentError(f"{where}: {exc.message}") from None
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> GameParams:
        return cls.from_dict(json.loads(text))


class PayoffPair(NamedTuple):
    """Utilities of the voter and the device."""

    u_V: float
    u_D: float


def _as_probs(values: Sequence[float], name: str) -> tuple[float, ...]:
    try:
        probs = tuple(float(v) for v in values)
    except (TypeError, ValueError):
        raise InvalidArgumentError(f"{name} must be a sequence of numbers") from None
    if not probs:
        raise InvalidArgumentError(f"{name} must not be empty")
    for p in probs:
        if not (0.0 <= p <= 1.0):
            raise InvalidArgumentError(f"{name} entries must lie in [0, 1], got {p!r}")
    return probs


@dataclass(frozen=True)
class VoterMixedStrategy:
    """Distribution of the casting round: ``probs[n - 1] = P(n_cast = n)``."""

    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        probs = _as_probs(self.probs, "voter probabilities")
        if abs(math.fsum(probs) - 1.0) > PROB_TOL:
            raise InvalidArgumentError(f"voter probabilities must sum to 1, got {math.fsum(probs)!r}")
        object.__setattr__(self, "probs", probs)

    @property
    def n_max(self) -> int:
        return len(self.probs)

    def to_list(self) -> list[float]:
        return list(self.probs)


@dataclass(frozen=True)
class DeviceMixedStrategy:
    """Distribution of the first cheating round.

    ``probs[n - 1] = P(n_cheat = n)`` and ``p_never = P(n_cheat = inf)``.
    """

    probs: tuple[float, ...]
    p_never: float = 0.0

    def __post_init__(self) -> None:
        probs = _as_probs(self.probs, "device probabilities")
        (p_never,) = _as_probs([self.p_never], "p_never")
        total = math.fsum(probs) + p_never
        if abs(total - 1.0) > PROB_TOL:
            raise InvalidArgumentError(f"device probabilities plus p_never must sum to 1, got {total!r}")
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "p_never", p_never)

    @property
    def n_max(self) -> int:
        return len(self.probs)

    def atoms(self) -> np.ndarray:
        """All ``n_max + 1`` probabilities with the never-cheat atom last."""
        return np.array([*self.probs, self.p_never])

    def to_dict(self) -> dict[str, Any]:
        return {"probs": list(self.probs), "p_never": self.p_never}

    @classmethod
    def from_dict(cls, data: dict[str, Any] | Sequence[float]) -> DeviceMixedStrategy:
        if isinstance(data, dict):
            return cls(data["probs"], data.get("p_never", 0.0))
        return cls(tuple(data))


@dataclass(frozen=True)
class VoterBehavioralStrategy:
    """Per-round casting probabilities ``b_1..b_{n_max}``.

    In round ``n`` (reached after ``n - 1`` audits) the voter casts with
    probability ``probs[n - 1]`` and audits otherwise.
    """

    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "probs", _as_probs(self.probs, "behavioral probabilities"))

    @property
    def n_max(self) -> int:
        return len(self.probs)

    @property
    def is_total(self) -> bool:
        """Whether the plan casts for sure by the last round."""
        return self.probs[-1] == 1.0

    def to_list(self) -> list[float]:
        return list(self.probs)


def _check_rounds(n_cast: int, n_cheat: float, n_max: int) -> None:
    if isinstance(n_cast, bool) or n_cast != int(n_cast) or not 1 <= n_cast <= n_max:
        raise InvalidArgumentError(f"n_cast must be an integer in 1..{n_max}, got {n_cast!r}")
    if n_cheat != NEVER and (n_cheat != int(n_cheat) or not 1 <= n_cheat <= n_max):
        raise InvalidArgumentError(f"n_cheat must be in 1..{n_max} or inf, got {n_cheat!r}")


def payoff(n_cast: int, n_cheat: float, params: GameParams) -> PayoffPair:
    """Utilities of the pure profile ``(n_cast, n_cheat)``.

    >>> p = GameParams(2, 3, 1, 4, 1, n_max=2)
    >>> payoff(2, 1, p)
    PayoffPair(u_V=-1.0, u_D=-4.0)
    """
    _check_rounds(n_cast, n_cheat, params.n_max)
    c = params.c_audit
    if n_cast < n_cheat:  # vote cast as intended
        return PayoffPair(params.asucc_V - (n_cast - 1) * c, 0.0)
    if n_cast == n_cheat:  # device cheats successfully
        return PayoffPair(-params.afail_V - (n_cast - 1) * c, params.asucc_D)
    return PayoffPair(-n_cheat * c, -params.afail_D)  # cheating caught in an audit


def payoff_matrices(params: GameParams) -> tuple[np.ndarray, np.ndarray]:
    """Voter and device payoff tables of shape ``(n_max, n_max + 1)``.

    Row ``i`` is ``n_cast = i + 1``; column ``j < n_max`` is ``n_cheat = j + 1``
    and the last column is ``n_cheat = inf``.
    """
    n = params.n_max
    u_v = np.empty((n, n + 1))
    u_d = np.empty((n, n + 1))
    cheats = [*range(1, n + 1), NEVER]
    for i in range(n):
        for j, m in enumerate(cheats):
            u_v[i, j], u_d[i, j] = payoff(i + 1, m, params)
    return u_v, u_d


def _check_dims(params: GameParams, *strategies: Any) -> None:
    for s in strategies:
        if s.n_max != params.n_max:
            raise InvalidArgumentError(
                f"{type(s).__name__} has {s.n_max} rounds but n_max = {params.n_max}"
            )


def expected_payoffs(
    s_V: VoterMixedStrategy, s_D: DeviceMixedStrategy, params: GameParams
) -> PayoffPair:
    """Expected utilities of a mixed profile, including the never-cheat atom."""
    _check_dims(params, s_V, s_D)
    u_v, u_d = payoff_matrices(params)
    p = np.asarray(s_V.probs)
    q = s_D.atoms()
    return PayoffPair(float(p @ u_v @ q), float(p @ u_d @ q))


def voter_round_payoffs(s_D: DeviceMixedStrategy, params: GameParams) -> np.ndarray:
    """Expected voter utility of each pure casting round against ``s_D``."""
    _check_dims(params, s_D)
    u_v, _ = payoff_matrices(params)
    return u_v @ s_D.atoms()


def device_round_payoffs(s_V: VoterMixedStrategy, params: GameParams) -> np.ndarray:
    """Expected device utility of each pure round ``1..n_max, inf`` against ``s_V``."""
    _check_dims(params, s_V)
    _, u_d = payoff_matrices(params)
    return np.asarray(s_V.probs) @ u_d


def behavioral_to_mixed(b_V: VoterBehavioralStrategy) -> VoterMixedStrategy:
    """Casting-round distribution induced by per-round lotteries.

    ``p_n = (1 - b_1) ... (1 - b_{n-1}) b_n``.

    Raises:
        ResidualProbabilityError: if ``b_{n_max} != 1``, so that the plan
            fails to cast with positive probability.
    """
    if not b_V.is_total:
        raise ResidualProbabilityError(
            f"last-round cast probability must be 1, got {b_V.probs[-1]!r}"
        )
    probs = []
    survive = 1.0
    for b in b_V.probs:
        probs.append(survive * b)
        survive *= 1.0 - b
    return VoterMixedStrategy(tuple(probs))


def mixed_to_behavioral(s_V: VoterMixedStrategy) -> VoterBehavioralStrategy:
    """Outcome-equivalent behavioral strategy of a mixed voter strategy.

    ``b_n = p_n / (p_n + ... + p_{n_max})``; rounds that are reached with
    probability zero get ``b_n = 1``.

    Raises:
        DegenerateTailError: if round ``n`` carries mass although the earlier
            rounds already use up the whole unit budget.
    """
    probs = s_V.probs
    # suffix sums keep the conditional probabilities accurate when the tail is tiny
    tails = np.cumsum(probs[::-1])[::-1]
    spent = 0.0
    out = []
    for p, tail in zip(probs, tails):
        if p > 0.0 and 1.0 - spent <= 0.0:
            raise DegenerateTailError(
                f"probability {p!r} assigned after the full mass was spent"
            )
        out.append(min(p / tail, 1.0) if tail > 0.0 else 1.0)
        spent += p
    out[-1] = 1.0
    return VoterBehavioralStrategy(tuple(out))
