from __future__ import annotations

from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import EXAMPLE4, game_params, random_params
from exact import device_equilibrium, expectation, table

from benaloh.game_model import (
    DeviceMixedStrategy,
    GameParams,
    VoterMixedStrategy,
    behavioral_to_mixed,
    device_round_payoffs,
    voter_round_payoffs,
)
from benaloh.nash import (
    approx_behavioral,
    nash_device,
    nash_solution,
    nash_voter_behavioral,
    nash_voter_mixed,
    verify_equilibrium,
)


def _params(**kw) -> GameParams:
    return GameParams(**{**EXAMPLE4, **kw})


# ---------------------------------------------------------------------------
# voter
# ---------------------------------------------------------------------------


def test_voter_mixed_example1(ex1):
    s = nash_voter_mixed(ex1)
    np.testing.assert_allclose(s.probs, [0.8, 0.16, 0.032, 0.006, 0.001], atol=5e-3)
    exact = [0.8 * 0.2**k / (1 - 0.2**5) for k in range(5)]
    np.testing.assert_allclose(s.probs, exact, rtol=1e-12)


def test_voter_mixed_single_round():
    assert nash_voter_mixed(_params(n_max=1)).probs == (1.0,)


def test_voter_mixed_even_stakes():
    params = _params(n_max=3, asucc_D=1, afail_D=1)
    s = nash_voter_mixed(params)
    np.testing.assert_allclose(s.probs, [4 / 7, 2 / 7, 1 / 7], rtol=1e-14)
    assert verify_equilibrium(s, nash_device(params), params)


@given(game_params())
def test_voter_mixed_geometric_ratio(params):
    p = np.asarray(nash_voter_mixed(params).probs)
    np.testing.assert_allclose(p[1:] / p[:-1], params.ratio, rtol=1e-12)
    assert np.all(p > 0)


def test_voter_behavioral_examples(ex1, ex4):
    np.testing.assert_allclose(nash_voter_behavioral(ex1).probs, [0.8, 0.801, 0.81, 0.83, 1], atol=5e-3)
    np.testing.assert_allclose(nash_voter_behavioral(ex4).probs, [5 / 6, 1], rtol=1e-15)


@given(game_params(n_max=2))
def test_voter_behavioral_two_rounds_closed_form(params):
    b1 = (params.asucc_D + params.afail_D) / (2 * params.asucc_D + params.afail_D)
    b = nash_voter_behavioral(params).probs
    assert b[0] == pytest.approx(b1, rel=1e-12)
    assert b[1] == 1.0


@given(game_params())
def test_behavioral_and_mixed_agree(params):
    via_b = behavioral_to_mixed(nash_voter_behavioral(params))
    np.testing.assert_allclose(via_b.probs, nash_voter_mixed(params).probs, atol=1e-12)


# ---------------------------------------------------------------------------
# device
# ---------------------------------------------------------------------------


def test_device_example4(ex4):
    s = nash_device(ex4)
    np.testing.assert_allclose(s.probs, [0.75, 0.25], atol=1e-12)
    assert s.p_never == 0.0


def test_device_single_round():
    assert nash_device(_params(n_max=1)).probs == (1.0,)


def test_device_three_rounds_against_exact_solve():
    params = _params(n_max=3)
    exact = device_equilibrium(2, 3, 1, 3)
    assert exact == [F(19, 27), F(6, 27), F(2, 27)]
    s = nash_device(params)
    np.testing.assert_allclose(s.probs, [float(x) for x in exact], rtol=1e-12)
    assert np.ptp(voter_round_payoffs(s, params)) < 1e-9


@given(game_params())
def test_device_matches_exact_recursion(params):
    exact = device_equilibrium(params.asucc_V, params.afail_V, params.c_audit, params.n_max)
    np.testing.assert_allclose(nash_device(params).probs, [float(x) for x in exact], rtol=1e-9)


@given(game_params())
def test_support_positivity_and_indifference(params):
    s_V, s_D = nash_voter_mixed(params), nash_device(params)
    assert min(s_V.probs) > 0 and min(s_D.probs) > 0
    scale = max(params.asucc_V, params.afail_V, params.asucc_D, params.afail_D) * params.n_max
    assert np.ptp(voter_round_payoffs(s_D, params)) <= 1e-9 * scale
    assert np.ptp(device_round_payoffs(s_V, params)[:-1]) <= 1e-9 * scale


# ---------------------------------------------------------------------------
# nash_solution
# ---------------------------------------------------------------------------


def test_solution_example4(ex4):
    sol = nash_solution(ex4)
    assert sol.R == pytest.approx(0.2)
    assert sol.Eu.u_V == pytest.approx(-7 / 4, abs=1e-12)
    assert sol.Eu.u_D == pytest.approx(1 / 6, abs=1e-12)
    assert sol.s_D.p_never == 0.0


def test_solution_single_round():
    params = _params(n_max=1)
    sol = nash_solution(params)
    assert sol.Eu == pytest.approx((-params.afail_V, params.asucc_D))


def test_solution_even_device_stakes():
    params = GameParams(asucc_V=1, afail_V=2, asucc_D=1, afail_D=1, c_audit=1, n_max=2)
    # worked by hand: s_V = [2/3, 1/3], s_D = [4/5, 1/5]
    exact = expectation(table(1, 2, 1, 1, 1, 2), [F(2, 3), F(1, 3)], [F(4, 5), F(1, 5)])
    assert exact == (F(-7, 5), F(1, 3))
    sol = nash_solution(params)
    assert sol.Eu == pytest.approx((-1.4, 1 / 3), abs=1e-12)


# ---------------------------------------------------------------------------
# approx_behavioral
# ---------------------------------------------------------------------------


def test_approx_behavioral_examples(ex1):
    assert approx_behavioral(ex1).probs == pytest.approx((0.8, 0.8, 0.8, 0.8, 1.0))
    assert approx_behavioral(_params(n_max=1)).probs == (1.0,)


def test_approx_behavioral_large_penalty():
    params = _params(asucc_D=1, afail_D=99, n_max=4)
    approx = np.asarray(approx_behavioral(params).probs)
    np.testing.assert_allclose(approx, [0.99, 0.99, 0.99, 1.0], rtol=1e-15)
    exact = np.asarray(nash_voter_behavioral(params).probs)
    assert np.max(np.abs(approx[:-1] - exact[:-1])) < 1e-4


def test_limit_property_monotone():
    dists = []
    for ratio in (1e2, 1e4, 1e6):
        params = _params(asucc_D=1, afail_D=ratio, n_max=5)
        b = np.asarray(nash_voter_behavioral(params).probs)
        dists.append(np.max(np.abs(b[:-1] - (1 - params.ratio))))
    assert dists[0] > dists[1] > dists[2]
    assert dists[1] < 1e-3


# ---------------------------------------------------------------------------
# verify_equilibrium
# ---------------------------------------------------------------------------


def test_verify_accepts_solution(ex4):
    sol = nash_solution(ex4)
    check = verify_equilibrium(sol.s_V, sol.s_D, ex4, tol=1e-9)
    assert check.is_equilibrium
    assert check.voter_residual < 1e-12 and check.device_residual < 1e-12


def test_verify_rejects_deterministic_profile(ex4):
    check = verify_equilibrium(VoterMixedStrategy((1, 0)), DeviceMixedStrategy((1, 0)), ex4, tol=1e-9)
    assert not check
    # casting in round 2 against a first-round cheater earns -c_audit instead of -afail_V
    assert check.voter_gain == pytest.approx(2.0)


def test_verify_rejects_honest_tail(ex4):
    s_D = nash_device(ex4)
    honest = DeviceMixedStrategy(tuple(0.9 * p for p in s_D.probs), 0.1)
    check = verify_equilibrium(nash_voter_mixed(ex4), honest, ex4, tol=1e-9)
    assert not check
    assert check.device_gain > 1e-3


def _perturbations(p: np.ndarray, step: float = 1e-3):
    for n in range(len(p)):
        for sign in (1, -1):
            if p[n] + sign * step < 0:
                continue
            q = p.copy()
            q[n] += sign * step
            yield q / q.sum()


def test_uniqueness_embodiment():
    """Geometric rivals and +-1e-3 perturbations of the NE voter strategy all fail.

    Parameter sets whose equilibrium puts under 1e-4 on some round are
    resampled: against such a device, a perturbation that only devalues that
    round gains the device less than the tolerance.
    """
    rng = np.random.default_rng(7)
    tested = 0
    while tested < 100:
        params = random_params(rng, int(rng.integers(2, 9)))
        s_V, s_D = nash_voter_mixed(params), nash_device(params)
        if min(s_D.probs) < 1e-4 or min(s_V.probs) < 1e-4:
            continue
        tested += 1
        assert verify_equilibrium(s_V, s_D, params)
        r = params.ratio
        for other in (r * 0.99, min(r * 1.01, 0.999)):
            geo = other ** np.arange(params.n_max)
            assert not verify_equilibrium(VoterMixedStrategy(tuple(geo / geo.sum())), s_D, params)
        for q in _perturbations(np.asarray(s_V.probs)):
            assert not verify_equilibrium(VoterMixedStrategy(tuple(q)), s_D, params)


def test_perturbation_breaks_device_indifference():
    rng = np.random.default_rng(11)
    for _ in range(100):
        params = random_params(rng, int(rng.integers(2, 9)))
        s_V, s_D = nash_voter_mixed(params), nash_device(params)
        for q in _perturbations(np.asarray(s_V.probs)):
            check = verify_equilibrium(VoterMixedStrategy(tuple(q)), s_D, params)
            assert check.device_residual > 1e-9


@settings(max_examples=200)
@given(game_params())
def test_solution_always_verifies(params):
    sol = nash_solution(params)
    assert verify_equilibrium(sol.s_V, sol.s_D, params, tol=1e-9)
