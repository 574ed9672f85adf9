"""Monte Carlo simulation of repeated cast-or-audit plays.

Trial ``i`` draws its uniforms from the Philox counter blocks
``[i * k, (i + 1) * k)`` under key ``seed``, where ``k`` blocks hold the
``n_max + 1`` uniforms a trial can need. The voter uses the leading uniforms
(one for a mixed strategy, up to ``n_max`` sequential lotteries for a
behavioral one) and the device always uses uniform ``n_max``. Results are
therefore identical however the trial range is split up, and a mixed run and
its behavioral twin see the same device draws.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Union

import numpy as np

from benaloh.exceptions import InvalidArgumentError, ResidualProbabilityError
from benaloh.game_model import (
    PROB_TOL,
    DeviceMixedStrategy,
    GameParams,
    VoterBehavioralStrategy,
    VoterMixedStrategy,
    mixed_to_behavioral,
    payoff_matrices,
)

VoterStrategy = Union[VoterMixedStrategy, VoterBehavioralStrategy]

CHUNK = 1 << 16
_U64_TO_UNIT = 2.0**-53
_MAX_SEED = 1 << 64


@dataclass(frozen=True)
class SimConfig:
    params: GameParams
    voter: VoterStrategy
    device: DeviceMixedStrategy
    trials: int
    seed: int = 0

    def __post_init__(self) -> None:
        if isinstance(self.trials, bool) or not isinstance(self.trials, (int, np.integer)) or self.trials < 1:
            raise InvalidArgumentError(f"trials must be an integer >= 1, got {self.trials!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed < _MAX_SEED:
            raise InvalidArgumentError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        for name, s in (("voter", self.voter), ("device", self.device)):
            if s.n_max != self.params.n_max:
                raise InvalidArgumentError(
                    f"{name} strategy has {s.n_max} rounds but n_max = {self.params.n_max}"
                )
        if isinstance(self.voter, VoterBehavioralStrategy) and not self.voter.is_total:
            raise ResidualProbabilityError("behavioral voter must cast with probability 1 in the last round")


@dataclass(frozen=True)
class SimResult:
    mean_u_V: float
    mean_u_D: float
    stderr_u_V: float
    stderr_u_D: float
    freq_cast_as_intended: float
    freq_cheated: float
    freq_caught: float
    trials: int

    def to_dict(self) -> dict:
        return asdict(self)


def _uniforms(seed: int, start: int, count: int, blocks: int) -> np.ndarray:
    bitgen = np.random.Philox(key=seed, counter=start * blocks)
    raw = bitgen.random_raw(count * 4 * blocks).reshape(count, 4 * blocks)
    return (raw >> np.uint64(11)) * _U64_TO_UNIT


def _inverse_cdf(probs: np.ndarray, u: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(probs)
    idx = np.searchsorted(cdf, u, side="right")
    # cdf[-1] may round to just below 1; never land on a zero-mass atom
    return np.minimum(idx, np.flatnonzero(probs > 0)[-1])


def outcome_counts(config: SimConfig) -> np.ndarray:
    """Counts of each pure profile, shape ``(n_max, n_max + 1)``; last column is never-cheat."""
    n = config.params.n_max
    blocks = -(-(n + 1) // 4)
    device_atoms = config.device.atoms()
    counts = np.zeros(n * (n + 1), dtype=np.int64)
    for start in range(0, config.trials, CHUNK):
        size = min(CHUNK, config.trials - start)
        u = _uniforms(config.seed, start, size, blocks)
        if isinstance(config.voter, VoterMixedStrategy):
            cast = _inverse_cdf(np.asarray(config.voter.probs), u[:, 0])
        else:
            hits = u[:, :n] < np.asarray(config.voter.probs)
            cast = np.argmax(hits, axis=1)
        cheat = _inverse_cdf(device_atoms, u[:, n])
        counts += np.bincount(cast * (n + 1) + cheat, minlength=n * (n + 1))
    return counts.reshape(n, n + 1)


def _mean_stderr(counts: np.ndarray, values: np.ndarray, trials: int) -> tuple[float, float]:
    mask = counts > 0
    c, v = counts[mask].astype(float), values[mask]
    mean = math.fsum(c * v) / trials
    if trials < 2:
        return mean, 0.0
    var = math.fsum(c * (v - mean) ** 2) / (trials - 1)
    return mean, math.sqrt(var / trials)


def simulate(config: SimConfig) -> SimResult:
    """Play ``config.trials`` independent games and average the utilities."""
    counts = outcome_counts(config)
    n = config.params.n_max
    u_v, u_d = payoff_matrices(config.params)
    rounds = np.arange(n)
    # column j < n is n_cheat = j + 1 and column n is never, which sorts after every cast
    cols = np.arange(n + 1)
    intended = rounds[:, None] < cols[None, :]
    cheated = rounds[:, None] == cols[None, :]
    caught = rounds[:, None] > cols[None, :]
    trials = config.trials
    mean_v, se_v = _mean_stderr(counts.ravel(), u_v.ravel(), trials)
    mean_d, se_d = _mean_stderr(counts.ravel(), u_d.ravel(), trials)
    return SimResult(
        mean_u_V=mean_v,
        mean_u_D=mean_d,
        stderr_u_V=se_v,
        stderr_u_D=se_d,
        freq_cast_as_intended=int(counts[intended].sum()) / trials,
        freq_cheated=int(counts[cheated].sum()) / trials,
        freq_caught=int(counts[caught].sum()) / trials,
        trials=trials,
    )


@dataclass(frozen=True)
class EquivalenceReport:
    mixed: SimResult
    behavioral: SimResult
    payoffs_agree: bool
    frequencies_agree: bool
    max_z: float

    @property
    def agree(self) -> bool:
        return self.payoffs_agree and self.frequencies_agree


def _z(a: float, b: float, se: float) -> float:
    if a == b:
        return 0.0
    return math.inf if se == 0.0 else abs(a - b) / se


def _freq_se(f: float, trials: int) -> float:
    return math.sqrt(f * (1.0 - f) / trials)


def simulate_equivalence(
    mixed: SimConfig, behavioral: SimConfig | None = None, z: float = 3.0
) -> EquivalenceReport:
    """Simulate a mixed voter and its behavioral image and compare the runs.

    Agreement means every mean payoff and outcome frequency differs by at
    most ``z`` combined standard errors.

    Raises:
        InvalidArgumentError: if the two configurations are not a mixed
            strategy and its behavioral conversion against the same device.
    """
    if not isinstance(mixed.voter, VoterMixedStrategy):
        raise InvalidArgumentError("first configuration must carry a mixed voter strategy")
    image = mixed_to_behavioral(mixed.voter)
    if behavioral is None:
        behavioral = SimConfig(mixed.params, image, mixed.device, mixed.trials, mixed.seed)
    if not isinstance(behavioral.voter, VoterBehavioralStrategy):
        raise InvalidArgumentError("second configuration must carry a behavioral voter strategy")
    if behavioral.params != mixed.params or behavioral.device != mixed.device:
        raise InvalidArgumentError("both runs must share parameters and device strategy")
    reached = np.asarray(mixed.voter.probs[::-1]).cumsum()[::-1] > 0
    diff = np.abs(np.asarray(behavioral.voter.probs) - np.asarray(image.probs))
    if np.any(diff[reached] > PROB_TOL):
        raise InvalidArgumentError("behavioral strategy is not the image of the mixed strategy")

    a, b = simulate(mixed), simulate(behavioral)
    zs_pay = [
        _z(a.mean_u_V, b.mean_u_V, math.hypot(a.stderr_u_V, b.stderr_u_V)),
        _z(a.mean_u_D, b.mean_u_D, math.hypot(a.stderr_u_D, b.stderr_u_D)),
    ]
    zs_freq = [
        _z(fa, fb, math.hypot(_freq_se(fa, a.trials), _freq_se(fb, b.trials)))
        for fa, fb in (
            (a.freq_cast_as_intended, b.freq_cast_as_intended),
            (a.freq_cheated, b.freq_cheated),
            (a.freq_caught, b.freq_caught),
        )
    ]
    return EquivalenceReport(
        mixed=a,
        behavioral=b,
        payoffs_agree=max(zs_pay) <= z,
        frequencies_agree=max(zs_freq) <= z,
        max_z=max(zs_pay + zs_freq),
    )
