from __future__ import annotations

import numpy as np
import pytest
from hypothesis import strategies as st

from benaloh.game_model import GameParams

EXAMPLE4 = dict(asucc_V=2, afail_V=3, asucc_D=1, afail_D=4, c_audit=1, n_max=2)
# the five-round example fixes only the device side; voter utilities follow the preset
EXAMPLE1 = dict(EXAMPLE4, n_max=5)


@pytest.fixture
def ex4() -> GameParams:
    return GameParams(**EXAMPLE4)


@pytest.fixture
def ex1() -> GameParams:
    return GameParams(**EXAMPLE1)


_utility = st.floats(min_value=0.1, max_value=100.0, allow_nan=False, allow_infinity=False)


@st.composite
def game_params(draw, n_max=st.integers(min_value=1, max_value=8)) -> GameParams:
    afail_V = draw(_utility)
    return GameParams(
        asucc_V=draw(_utility),
        afail_V=afail_V,
        asucc_D=draw(_utility),
        afail_D=draw(_utility),
        c_audit=afail_V * draw(st.floats(min_value=0.01, max_value=0.99)),
        n_max=draw(n_max) if isinstance(n_max, st.SearchStrategy) else n_max,
    )


def random_params(rng: np.random.Generator, n_max: int) -> GameParams:
    """Log-uniform utilities in [0.1, 100] with c_audit < afail_V."""
    aV, fV, aD, fD = 10.0 ** rng.uniform(-1, 2, size=4)
    return GameParams(aV, fV, aD, fD, fV * rng.uniform(0.01, 0.99), n_max)


_CRITERIA_KEY = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Print and record one ``AC n: PASS/FAIL`` line, then assert it."""
    lines = request.config.stash.setdefault(_CRITERIA_KEY, [])

    def report(number: int, checks: dict[str, bool], detail: str = "") -> None:
        ok = all(checks.values())
        failed = [name for name, passed in checks.items() if not passed]
        line = f"AC {number}: {'PASS' if ok else 'FAIL'}"
        if failed:
            line += f" (failed: {', '.join(failed)})"
        if detail:
            line += f" {detail}"
        print(line)
        lines.append(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_CRITERIA_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
