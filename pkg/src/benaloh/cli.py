"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 invalid input, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import jsonschema
import numpy as np

from benaloh.exceptions import BenalohError, InvalidArgumentError
from benaloh.game_model import (
    GAME_PARAMS_SCHEMA,
    DeviceMixedStrategy,
    GameParams,
    VoterBehavioralStrategy,
    VoterMixedStrategy,
    behavioral_to_mixed,
    mixed_to_behavioral,
)
from benaloh.nash import nash_solution, nash_voter_behavioral, nash_voter_mixed, verify_equilibrium
from benaloh.oracle import (
    backward_induction_probe,
    brute_force_device_br,
    build_game_tree,
    grid_sweep_sval,
    pure_nash_profiles,
    sval_grid_gap_bound,
    tree_table_mismatches,
)
from benaloh.simulator import SimConfig, simulate
from benaloh.stackelberg import (
    BestResponseSet,
    best_response_device,
    compare_nash_stackelberg,
    nash_first_round_cast,
    stackelberg_value,
    utility_vs_best_response_grid,
)

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_IO = 0, 1, 2, 3

PRESETS = {
    "culnane-teague": {"asucc_V": 2, "afail_V": 3, "asucc_D": 1, "afail_D": 4, "c_audit": 1, "n_max": 2},
}

_PROBS = {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1}, "minItems": 1}
CONFIG_SCHEMA: dict[str, Any] = {
    "type": "object",
    "properties": {
        "params": GAME_PARAMS_SCHEMA,
        "strategies": {
            "type": "object",
            "properties": {
                "voter": _PROBS,
                "voter_behavioral": _PROBS,
                "device": {
                    "oneOf": [
                        _PROBS,
                        {
                            "type": "object",
                            "properties": {"probs": _PROBS, "p_never": {"type": "number", "minimum": 0, "maximum": 1}},
                            "required": ["probs"],
                            "additionalProperties": False,
                        },
                    ]
                },
            },
            "additionalProperties": False,
        },
        "sim": {
            "type": "object",
            "properties": {
                "trials": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
            },
            "additionalProperties": False,
        },
        "sweep": {
            "type": "object",
            "properties": {"grid_n": {"type": "integer", "minimum": 1}},
            "additionalProperties": False,
        },
    },
    "required": ["params"],
    "additionalProperties": False,
}


class CLIError(Exception):
    def __init__(self, message: str, code: int) -> None:
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class RunConfig:
    params: GameParams
    voter: VoterMixedStrategy | None = None
    voter_behavioral: VoterBehavioralStrategy | None = None
    device: DeviceMixedStrategy | None = None
    trials: int | None = None
    seed: int | None = None
    grid_n: int | None = None

    @classmethod
    def from_dict(cls, data: Any) -> RunConfig:
        try:
            jsonschema.validate(data, CONFIG_SCHEMA)
        except jsonschema.ValidationError as exc:
            where = ".".join(str(p) for p in exc.absolute_path) or "config"
            raise InvalidArgumentError(f"{where}: {exc.message}") from None
        params = GameParams.from_dict(data["params"])
        strategies = data.get("strategies", {})
        sim = data.get("sim", {})
        return cls(
            params=params,
            voter=VoterMixedStrategy(strategies["voter"]) if "voter" in strategies else None,
            voter_behavioral=(
                VoterBehavioralStrategy(strategies["voter_behavioral"])
                if "voter_behavioral" in strategies
                else None
            ),
            device=DeviceMixedStrategy.from_dict(strategies["device"]) if "device" in strategies else None,
            trials=sim.get("trials"),
            seed=sim.get("seed"),
            grid_n=data.get("sweep", {}).get("grid_n"),
        )


def fmt(x: float) -> str:
    """Shortest round-trip decimal, without a trailing ``.0``."""
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def fmt_list(xs: Sequence[float]) -> str:
    return "[" + ", ".join(fmt(x) for x in xs) + "]"


def load_config(args: argparse.Namespace) -> RunConfig:
    if args.example is not None:
        return RunConfig(params=GameParams.from_dict(PRESETS[args.example]))
    if args.config is None:
        raise CLIError("either --config or --example is required", EXIT_INPUT)
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        raise CLIError(f"cannot read config {args.config}: {exc.strerror}", EXIT_IO) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CLIError(f"config is not valid JSON: {exc}", EXIT_INPUT) from None
    return RunConfig.from_dict(data)


def _voter_mixed(cfg: RunConfig) -> VoterMixedStrategy:
    if cfg.voter is not None:
        return cfg.voter
    if cfg.voter_behavioral is not None:
        return behavioral_to_mixed(cfg.voter_behavioral)
    return nash_voter_mixed(cfg.params)


def _emit_json(obj: Any) -> None:
    print(json.dumps(obj, indent=2))


def cmd_nash(args: argparse.Namespace, cfg: RunConfig) -> int:
    sol = nash_solution(cfg.params)
    if args.json:
        _emit_json(sol.to_dict())
        return EXIT_OK
    print(f"R = {fmt(sol.R)}")
    print(f"s_V = {fmt_list(sol.s_V.probs)}")
    print(f"b_V = {fmt_list(sol.b_V.probs)}")
    print(f"s_D = {fmt_list(sol.s_D.probs)}")
    print(f"p_never = {fmt(sol.s_D.p_never)}")
    print(f"Eu_V = {fmt(sol.Eu.u_V)}")
    print(f"Eu_D = {fmt(sol.Eu.u_D)}")
    print()
    print(f"{'round':>5} {'s_V':>10} {'b_V':>10} {'s_D':>10}")
    for n, row in enumerate(zip(sol.s_V.probs, sol.b_V.probs, sol.s_D.probs), start=1):
        print(f"{n:>5} " + " ".join(f"{x:>10.6f}" for x in row))
    return EXIT_OK


def cmd_stackelberg(args: argparse.Namespace, cfg: RunConfig) -> int:
    epsilon = 0.01 if args.epsilon is None else args.epsilon
    report = compare_nash_stackelberg(cfg.params, epsilon)
    if args.json:
        _emit_json(report.to_dict())
        return EXIT_OK
    print(f"SVal = {fmt(report.sval)}")
    print(f"p_V_NE = {fmt(report.p_V_NE)}")
    print(f"nash_Eu_V = {fmt(report.nash_Eu_V)}")
    print(f"epsilon = {fmt(report.epsilon)}")
    print(f"p_V_eps = {fmt(report.p_V_eps)}")
    print(f"Eu_V_eps = {fmt(report.Eu_V_eps)}")
    return EXIT_OK


SWEEP_HEADER = ("p_V", "eu_vs_br", "nash_eu_V", "sval")


def sweep_rows(params: GameParams, grid_n: int) -> list[tuple[float, float, float, float]]:
    if grid_n < 1:
        raise InvalidArgumentError(f"grid must be >= 1, got {grid_n}")
    p = np.arange(grid_n + 1) / grid_n
    eu = utility_vs_best_response_grid(p, params)
    nash_eu = nash_solution(params).Eu.u_V
    sval = stackelberg_value(params)
    return [(float(a), float(b), nash_eu, sval) for a, b in zip(p, eu)]


def cmd_sweep(args: argparse.Namespace, cfg: RunConfig) -> int:
    grid_n = args.grid or cfg.grid_n or 1000
    rows = sweep_rows(cfg.params, grid_n)

    def write(fh) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SWEEP_HEADER)
        writer.writerows([fmt(x) for x in row] for row in rows)

    if args.out is None:
        write(sys.stdout)
        return EXIT_OK
    try:
        with open(args.out, "w", newline="") as fh:
            write(fh)
    except OSError as exc:
        raise CLIError(f"cannot write {args.out}: {exc.strerror}", EXIT_IO) from None
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace, cfg: RunConfig) -> int:
    params = cfg.params
    voter: VoterMixedStrategy | VoterBehavioralStrategy = _voter_mixed(cfg)
    if args.behavioral:
        voter = cfg.voter_behavioral or mixed_to_behavioral(voter)
    device = cfg.device or nash_solution(params).s_D
    trials = args.trials or cfg.trials or 100_000
    seed = args.seed if args.seed is not None else (cfg.seed or 0)
    result = simulate(SimConfig(params, voter, device, trials, seed))
    _emit_json(result.to_dict())
    return EXIT_OK


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def run_checks(cfg: RunConfig) -> list[Check]:
    """The oracle suite behind ``verify``."""
    params = cfg.params
    checks = []

    s_V = _voter_mixed(cfg)
    s_D = cfg.device or nash_solution(params).s_D
    eq = verify_equilibrium(s_V, s_D, params)
    checks.append(Check(
        "equilibrium", eq.is_equilibrium,
        f"voter_gain={eq.voter_gain:.3e} device_gain={eq.device_gain:.3e} "
        f"voter_residual={eq.voter_residual:.3e} device_residual={eq.device_residual:.3e}",
    ))

    mixed = np.asarray(nash_voter_mixed(params).probs)
    from_behavioral = np.asarray(behavioral_to_mixed(nash_voter_behavioral(params)).probs)
    err = float(np.max(np.abs(mixed - from_behavioral)))
    checks.append(Check("behavioral_consistency", err <= 1e-12, f"max_abs_diff={err:.3e}"))

    bad = tree_table_mismatches(params)
    checks.append(Check("tree_table", not bad, f"mismatches={len(bad)}"))

    probe = backward_induction_probe(build_game_tree(params))
    expected_second = None if params.n_max == 1 else False
    checks.append(Check(
        "backward_induction",
        probe.last_round_eliminated and probe.second_to_last_eliminable == expected_second,
        f"last_round_eliminated={probe.last_round_eliminated} "
        f"second_to_last_eliminable={probe.second_to_last_eliminable}",
    ))

    stable = pure_nash_profiles(params)
    checks.append(Check("no_pure_equilibrium", not stable, f"stable_profiles={stable}"))

    if params.n_max == 2:
        sval = stackelberg_value(params)
        grid_n = cfg.grid_n or 100_000
        sup, arg = grid_sweep_sval(params, grid_n)
        gap = sval - sup
        ok = 0 < gap <= sval_grid_gap_bound(params, grid_n) * (1 + 1e-9)
        checks.append(Check("stackelberg_grid", ok, f"sval={fmt(sval)} grid_sup={fmt(sup)} at p_V={fmt(arg)}"))

        p_ne = nash_first_round_cast(params)
        probes = sorted({*np.linspace(0.0, 1.0, 101).tolist(), p_ne})
        disagree = [p for p in probes if not _br_agrees(p, params)]
        checks.append(Check("best_response", not disagree, f"checked={len(probes)} disagreements={disagree}"))
    return checks


def _br_agrees(p_V: float, params: GameParams) -> bool:
    closed = best_response_device(p_V, params)
    grid = brute_force_device_br(p_V, params)
    if closed is BestResponseSet.FULL_INTERVAL:
        return len(grid) == 1001
    return len(grid) == 1 and closed.contains(float(grid[0]))


def cmd_verify(args: argparse.Namespace, cfg: RunConfig) -> int:
    checks = run_checks(cfg)
    ok = all(c.passed for c in checks)
    if args.json:
        _emit_json({
            "passed": ok,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks],
        })
    else:
        for c in checks:
            print(f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}")
        if not ok:
            failing = ", ".join(c.name for c in checks if not c.passed)
            print(f"failing checks: {failing}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_VERIFY


COMMANDS = {
    "nash": (cmd_nash, "Nash equilibrium strategies and payoffs"),
    "stackelberg": (cmd_stackelberg, "Stackelberg value and epsilon-optimal voter strategy (n_max = 2)"),
    "simulate": (cmd_simulate, "Monte Carlo simulation of repeated plays"),
    "sweep": (cmd_sweep, "CSV of the voter's payoff against best response (n_max = 2)"),
    "verify": (cmd_verify, "brute-force oracle checks"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration")
    common.add_argument("--example", choices=sorted(PRESETS), help="use a built-in parameter preset")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, help="simulation seed (unsigned 64-bit)")
    common.add_argument("--trials", type=int, help="number of simulated games")
    common.add_argument("--behavioral", action="store_true", help="simulate the behavioral form of the voter strategy")
    common.add_argument("--grid", type=int, help="grid intervals for sweep/verify")
    common.add_argument("--epsilon", type=float, help="Stackelberg approximation margin (default 0.01)")
    common.add_argument("--out", metavar="PATH", help="output CSV path (default stdout)")

    parser = argparse.ArgumentParser(prog="benaloh", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handler = COMMANDS[args.command][0]
    try:
        cfg = load_config(args)
        if args.grid is not None and args.command == "verify":
            cfg = RunConfig(**{**cfg.__dict__, "grid_n": args.grid})
        return handler(args, cfg)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (InvalidArgumentError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BenalohError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
