"""Brute-force checks that do not reuse the closed-form solvers.

Everything here is evaluated by enumeration: the extensive-form game tree,
dominance at its bottom levels, grid sweeps over the voter's first-round
probability and grid searches for the device's best response.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from benaloh.exceptions import InvalidArgumentError, UnsupportedHorizonError
from benaloh.game_model import NEVER, GameParams, PayoffPair, payoff

CAST, AUDIT = "cast", "audit"
TRUE, FALSE = "true", "false"

FLAT_TOL = 1e-12
SVAL_GRID = 100_000
BR_GRID = 1_000

JointAction = tuple[str, str]


@dataclass
class GameTreeNode:
    """One round of the concurrent extensive-form game.

    Internal nodes map each joint action ``(voter, device)`` to a child;
    leaves carry the payoff ``outcome``.
    """

    round: int
    terminal: bool = False
    outcome: PayoffPair | None = None
    children: dict[JointAction, GameTreeNode] = field(default_factory=dict)

    def leaves(self, history: tuple[JointAction, ...] = ()) -> Iterator[tuple[tuple[JointAction, ...], GameTreeNode]]:
        if self.terminal:
            yield history, self
            return
        for action, child in self.children.items():
            yield from child.leaves(history + (action,))

    def depth(self) -> int:
        if self.terminal:
            return 0
        return 1 + max(child.depth() for child in self.children.values())


def build_game_tree(params: GameParams) -> GameTreeNode:
    """Game tree of the ``n_max``-round game.

    ``(audit, true)`` moves on to the next round; every other joint action
    ends the game. In the last round the voter can only cast.
    """
    a_v, f_v = params.asucc_V, params.afail_V
    a_d, f_d = params.asucc_D, params.afail_D
    c = params.c_audit

    def node(n: int) -> GameTreeNode:
        audits = (n - 1) * c
        children = {
            (CAST, TRUE): GameTreeNode(n, True, PayoffPair(a_v - audits, 0.0)),
            (CAST, FALSE): GameTreeNode(n, True, PayoffPair(-f_v - audits, a_d)),
        }
        if n < params.n_max:
            children[(AUDIT, TRUE)] = node(n + 1)
            children[(AUDIT, FALSE)] = GameTreeNode(n, True, PayoffPair(-n * c, -f_d))
        return GameTreeNode(n, children=children)

    return node(1)


def history_to_profile(history: tuple[JointAction, ...]) -> tuple[int, float]:
    """Pure ``(n_cast, n_cheat)`` profile consistent with a terminal history.

    When the game ends before the device cheats, any later cheating round
    gives the same payoff; ``inf`` is returned.
    """
    n = len(history)
    voter, device = history[-1]
    n_cast = n if voter == CAST else n + 1
    n_cheat = n if device == FALSE else NEVER
    return n_cast, n_cheat


def tree_table_mismatches(params: GameParams, tol: float = 0.0) -> list[tuple]:
    """Terminal histories whose leaf payoff differs from :func:`payoff`."""
    bad = []
    for history, leaf in build_game_tree(params).leaves():
        n_cast, n_cheat = history_to_profile(history)
        expected = payoff(n_cast, n_cheat, params)
        if any(abs(x - y) > tol for x, y in zip(leaf.outcome, expected)):
            bad.append((history, leaf.outcome, expected))
    return bad


def _weakly_dominated(vectors: dict[str, list[float]]) -> set[str]:
    out = set()
    for a, va in vectors.items():
        for b, vb in vectors.items():
            if a != b and all(y >= x for x, y in zip(va, vb)) and any(y > x for x, y in zip(va, vb)):
                out.add(a)
    return out


def _dominated_actions(outcomes: dict[JointAction, PayoffPair]) -> tuple[set[str], set[str]]:
    voter_actions = sorted({v for v, _ in outcomes})
    device_actions = sorted({d for _, d in outcomes})
    voter_vecs = {v: [outcomes[v, d].u_V for d in device_actions] for v in voter_actions}
    device_vecs = {d: [outcomes[v, d].u_D for v in voter_actions] for d in device_actions}
    return _weakly_dominated(voter_vecs), _weakly_dominated(device_vecs)


@dataclass(frozen=True)
class BackwardInductionReport:
    """``second_to_last_eliminable`` is ``None`` when there is no such round."""

    last_round_eliminated: bool
    second_to_last_eliminable: bool | None


def backward_induction_probe(tree: GameTreeNode) -> BackwardInductionReport:
    """Run backward induction on the two deepest rounds of the tree."""
    path = [tree]
    while (AUDIT, TRUE) in path[-1].children:
        path.append(path[-1].children[AUDIT, TRUE])

    last = path[-1]
    last_outcomes = {a: c.outcome for a, c in last.children.items()}
    _, device_dom = _dominated_actions(last_outcomes)
    last_eliminated = TRUE in device_dom
    if len(path) == 1:
        return BackwardInductionReport(last_eliminated, None)

    survivors = [o for (v, d), o in last_outcomes.items() if d not in device_dom]
    if len(survivors) != 1:
        return BackwardInductionReport(last_eliminated, False)
    prev = path[-2]
    outcomes = {
        a: (survivors[0] if a == (AUDIT, TRUE) else child.outcome)
        for a, child in prev.children.items()
    }
    voter_dom, device_dom = _dominated_actions(outcomes)
    return BackwardInductionReport(last_eliminated, bool(voter_dom or device_dom))


def pure_nash_profiles(params: GameParams) -> list[tuple[int, float]]:
    """Pure profiles from which neither player has a profitable deviation."""
    casts = range(1, params.n_max + 1)
    cheats = [*casts, NEVER]
    stable = []
    for n_cast, n_cheat in itertools.product(casts, cheats):
        u = payoff(n_cast, n_cheat, params)
        if any(payoff(k, n_cheat, params).u_V > u.u_V for k in casts):
            continue
        if any(payoff(n_cast, m, params).u_D > u.u_D for m in cheats):
            continue
        stable.append((n_cast, n_cheat))
    return stable


def _require_two_rounds(params: GameParams) -> None:
    if params.n_max != 2:
        raise UnsupportedHorizonError(f"grid oracles need n_max = 2, got {params.n_max}")


def device_payoff_2r(p_V, p_D, params: GameParams):
    """Device's expected utility for first-round cast/cheat probabilities."""
    return (
        p_V * p_D * params.asucc_D
        - (1.0 - p_V) * p_D * params.afail_D
        + (1.0 - p_V) * (1.0 - p_D) * params.asucc_D
    )


def voter_payoff_2r(p_V, p_D, params: GameParams):
    """Voter's expected utility for first-round cast/cheat probabilities."""
    return (
        -p_V * p_D * params.afail_V
        + p_V * (1.0 - p_D) * params.asucc_V
        - (1.0 - p_V) * p_D * params.c_audit
        - (1.0 - p_V) * (1.0 - p_D) * (params.c_audit + params.afail_V)
    )


def brute_force_device_br(p_V: float, params: GameParams, grid_n: int = BR_GRID) -> np.ndarray:
    """Grid points ``p_D`` whose device payoff is within ``FLAT_TOL`` of the grid maximum."""
    _require_two_rounds(params)
    if grid_n < 1:
        raise InvalidArgumentError("grid_n must be >= 1")
    p_D = np.linspace(0.0, 1.0, grid_n + 1)
    eu = device_payoff_2r(p_V, p_D, params)
    return p_D[eu >= eu.max() - FLAT_TOL]


def grid_sweep_sval(params: GameParams, grid_n: int = SVAL_GRID) -> tuple[float, float]:
    """Largest guaranteed voter payoff on the grid ``p_V = i / grid_n``.

    The device's best response at each grid point is read off the sign of
    its payoff gain from cheating first (flat within ``FLAT_TOL`` means any
    ``p_D``), and the voter is charged the worst case over that set.

    Returns:
        ``(sup_estimate, argmax_p)``.
    """
    _require_two_rounds(params)
    if grid_n < 2:
        raise InvalidArgumentError("grid_n must be >= 2")
    p = np.arange(grid_n + 1) / grid_n
    gain = device_payoff_2r(p, 1.0, params) - device_payoff_2r(p, 0.0, params)
    honest = voter_payoff_2r(p, 0.0, params)
    cheat = voter_payoff_2r(p, 1.0, params)
    worst = np.where(gain < -FLAT_TOL, honest, np.where(gain > FLAT_TOL, cheat, np.minimum(honest, cheat)))
    i = int(np.argmax(worst))
    return float(worst[i]), float(p[i])


def sval_grid_gap_bound(params: GameParams, grid_n: int) -> float:
    """Upper bound on ``SVal - sup_estimate``: slope of the rising branch times spacing."""
    return (params.asucc_V + params.afail_V + params.c_audit) / grid_n
