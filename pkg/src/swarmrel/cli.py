"""Command-line front end: analysis, simulation, comparison, sweeps, tuning.

Every command reads a scenario from ``--config`` and emits CSV (stdout or
``--out``); human-readable progress goes to stderr so the CSV stream stays
clean.  Exit codes: 0 success, 2 bad configuration or arguments, 3 numerical
or placement failure.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from dataclasses import dataclass, replace

from . import analytic, mc, scenario
from .geometry import PlacementError
from .scenario import ConfigError, ScenarioConfig
from .specfun import NumericalError

__all__ = ["main", "SweepSpec", "SEED_ENV_VAR", "DEFAULT_SEED"]

SEED_ENV_VAR = "SWARMREL_SEED"
DEFAULT_SEED = 20210
DEFAULT_TRIALS = 20_000

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

SWEEPABLE = (
    "message_bits",
    "swarm_radius_m",
    "swarm_altitude_m",
    "tau_phase1_s",
    "n_uavs",
    "m_available",
    "m_occupied",
    "rounds",
)
_INT_VARS = {"n_uavs", "m_available", "m_occupied", "rounds"}

_PROTOCOLS = {
    "proposed": mc.PROPOSED,
    "nearest_gbs": mc.NEAREST_GBS,
    "all_gbs": mc.ALL_GBS,
    "head_relay": mc.HEAD_RELAY,
}


@dataclass(frozen=True)
class SweepSpec:
    """One swept variable, its values, and the engines to evaluate."""

    variable: str
    values: tuple
    engines: tuple  # subset of ("analytic", "mc")
    protocol: mc.Protocol

    def __post_init__(self):
        if self.variable not in SWEEPABLE:
            raise ConfigError(f"variable: must be one of {', '.join(SWEEPABLE)}")
        if not self.values:
            raise ConfigError("values: must be non-empty")
        if not self.engines:
            raise ConfigError("engines: must be non-empty")


def _status(msg: str) -> None:
    print(msg, file=sys.stderr)


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            seed = int(env)
        except ValueError:
            raise ConfigError(f"{SEED_ENV_VAR}: cannot parse {env!r} as an integer")
        if not 0 <= seed < 2**64:
            raise ConfigError(f"{SEED_ENV_VAR}: seed must be in [0, 2^64), got {seed}")
        return seed
    return DEFAULT_SEED


def _uint64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be in [0, 2^64), got {value}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _open_out(args):
    if args.out is None or args.out == "-":
        return sys.stdout, False
    return open(args.out, "w", newline="", encoding="utf-8"), True


def _write_rows(args, header, rows):
    fh, close = _open_out(args)
    try:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if close:
            fh.close()


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return repr(value)
    return str(value)


def _set_variable(config: ScenarioConfig, variable: str, value) -> ScenarioConfig:
    if variable == "rounds":
        return config
    return replace(config, **{variable: value})


def _protocol_for(args, rounds_override=None) -> mc.Protocol:
    name = getattr(args, "protocol", "proposed")
    if name == "multi_round":
        rounds = rounds_override if rounds_override is not None else args.rounds
        try:
            return mc.multi_round(rounds, with_head=not args.no_head)
        except ValueError as exc:
            raise ConfigError(f"rounds: {exc}")
    return _PROTOCOLS[name]


# --- commands -----------------------------------------------------------------

_ANALYZE_HEADER = [
    "engine",
    "protocol",
    "trials",
    "seed",
    "p_head",
    "p_member",
    "expected_phase1",
    "k_effective",
    "p_phase2",
    "eta",
    "one_minus_eta",
    "std_err",
    "in_regime",
]
_EST_HEADER = ["engine", "protocol", "trials", "seed", "eta", "one_minus_eta", "std_err"]


def cmd_analyze(args) -> int:
    config = scenario.validate(scenario.read_config(args.config))
    seed = _resolve_seed(args)
    br = analytic.reliability(config)
    _status(
        f"p_head={br.p_head:.6f} p_member={br.p_member:.6f} "
        f"expected_phase1={br.expected_phase1:.4f} k_effective={br.k_effective:.4f} "
        f"p_phase2={br.p_phase2:.6f} eta={br.eta:.6f} in_regime={br.in_regime}"
    )
    if not br.in_regime:
        _status("warning: fewer than one expected decoder after the cellular stage; "
                "the relay-stage approximation is out of its regime")
    row = [
        "analytic",
        "proposed",
        "",
        _fmt(seed),
        _fmt(br.p_head),
        _fmt(br.p_member),
        _fmt(br.expected_phase1),
        _fmt(br.k_effective),
        _fmt(br.p_phase2),
        _fmt(br.eta),
        _fmt(1.0 - br.eta),
        "",
        str(int(br.in_regime)),
    ]
    _write_rows(args, _ANALYZE_HEADER, [row])
    return 0


def cmd_simulate(args) -> int:
    config = scenario.validate(scenario.read_config(args.config))
    seed = _resolve_seed(args)
    protocol = _protocol_for(args)
    est = mc.estimate(config, protocol, args.trials, seed, workers=args.workers)
    _status(f"eta={est.eta_mean:.6f} std_err={est.std_err:.2e} trials={est.trials} seed={est.seed}")
    row = [
        "mc",
        protocol.label,
        est.trials,
        est.seed,
        _fmt(est.eta_mean),
        _fmt(1.0 - est.eta_mean),
        _fmt(est.std_err),
    ]
    _write_rows(args, _EST_HEADER, [row])
    return 0


def cmd_compare(args) -> int:
    config = scenario.validate(scenario.read_config(args.config))
    seed = _resolve_seed(args)
    rows = []
    for protocol in (mc.PROPOSED, mc.NEAREST_GBS, mc.ALL_GBS, mc.HEAD_RELAY):
        est = mc.estimate(config, protocol, args.trials, seed, workers=args.workers)
        _status(f"{protocol.label}: eta={est.eta_mean:.6f} std_err={est.std_err:.2e}")
        rows.append(
            [
                "mc",
                protocol.label,
                est.trials,
                est.seed,
                _fmt(est.eta_mean),
                _fmt(1.0 - est.eta_mean),
                _fmt(est.std_err),
            ]
        )
    _write_rows(args, _EST_HEADER, rows)
    return 0


_SWEEP_HEADER = [
    "variable",
    "value",
    "engine",
    "protocol",
    "trials",
    "seed",
    "eta",
    "one_minus_eta",
    "std_err",
]


def _parse_values(args) -> tuple:
    if args.values is not None:
        parts = [p for p in args.values.split(",") if p.strip()]
        if not parts:
            raise ConfigError("values: must be non-empty")
        out = []
        for p in parts:
            out.append(int(p) if args.var in _INT_VARS else float(p))
        return tuple(out)
    if args.start is None or args.stop is None or args.step is None:
        raise ConfigError("values: give either --values or all of --start/--stop/--step")
    if args.step <= 0:
        raise ConfigError(f"step: must be > 0, got {args.step}")
    out = []
    v = args.start
    # tolerate float accumulation up to half a step beyond the endpoint
    while v <= args.stop + 0.5 * args.step:
        out.append(int(round(v)) if args.var in _INT_VARS else v)
        v += args.step
    if not out:
        raise ConfigError("values: empty grid")
    return tuple(out)


def _sweep_rows(config, spec: SweepSpec, trials, seed, workers):
    rows = []
    for value in spec.values:
        rounds_override = value if spec.variable == "rounds" else None
        point = scenario.validate(_set_variable(config, spec.variable, value))
        for engine in spec.engines:
            if engine == "analytic":
                br = analytic.reliability(point)
                rows.append(
                    [
                        spec.variable,
                        _fmt(value),
                        "analytic",
                        "proposed",
                        "",
                        _fmt(seed),
                        _fmt(br.eta),
                        _fmt(1.0 - br.eta),
                        "",
                    ]
                )
            else:
                protocol = spec.protocol
                if rounds_override is not None:
                    protocol = mc.multi_round(rounds_override, with_head=protocol.with_head)
                est = mc.estimate(point, protocol, trials, seed, workers=workers)
                rows.append(
                    [
                        spec.variable,
                        _fmt(value),
                        "mc",
                        protocol.label,
                        est.trials,
                        est.seed,
                        _fmt(est.eta_mean),
                        _fmt(1.0 - est.eta_mean),
                        _fmt(est.std_err),
                    ]
                )
        _status(f"{spec.variable}={value}: done")
    return rows


def cmd_sweep(args) -> int:
    config = scenario.validate(scenario.read_config(args.config))
    seed = _resolve_seed(args)
    engines = ("analytic", "mc") if args.engine == "both" else (args.engine,)
    protocol = _protocol_for(args)
    values = _parse_values(args)
    if args.var == "rounds" and protocol.name != "multi_round":
        raise ConfigError("variable 'rounds' requires --protocol multi_round")
    if "analytic" in engines and protocol.name != "proposed":
        raise ConfigError("the analytic engine models the proposed two-phase protocol only")
    spec = SweepSpec(variable=args.var, values=values, engines=engines, protocol=protocol)
    rows = _sweep_rows(config, spec, args.trials, seed, args.workers)
    _write_rows(args, _SWEEP_HEADER, rows)
    return 0


_OPT_HEADER = _SWEEP_HEADER + ["is_best"]


def cmd_optimize_tau(args) -> int:
    config = scenario.validate(scenario.read_config(args.config))
    seed = _resolve_seed(args)
    if args.step <= 0:
        raise ConfigError(f"step: must be > 0, got {args.step}")
    grid = []
    v = args.start
    while v <= args.stop + 0.5 * args.step:
        grid.append(v)
        v += args.step
    if not grid:
        raise ConfigError("grid: empty")
    if grid[0] <= 0 or grid[-1] >= config.tau_total_s:
        raise ConfigError(
            f"grid: tau_phase1_s values must lie strictly inside (0, {config.tau_total_s})"
        )
    results = []
    for t1 in grid:
        point = scenario.validate(replace(config, tau_phase1_s=t1))
        if args.engine == "analytic":
            eta, std_err, trials = analytic.reliability(point).eta, None, ""
        else:
            est = mc.estimate(point, mc.PROPOSED, args.trials, seed, workers=args.workers)
            eta, std_err, trials = est.eta_mean, est.std_err, est.trials
        results.append((t1, eta, std_err, trials))
        _status(f"tau_phase1_s={t1:.6g}: eta={eta:.6f}")
    # argmax with ties broken toward the smaller split (longer relay stage)
    best_eta = max(r[1] for r in results)
    best_t1 = min(r[0] for r in results if r[1] == best_eta)
    rows = []
    for t1, eta, std_err, trials in results:
        rows.append(
            [
                "tau_phase1_s",
                _fmt(t1),
                args.engine,
                "proposed",
                trials,
                _fmt(seed),
                _fmt(eta),
                _fmt(1.0 - eta),
                _fmt(std_err),
                str(int(t1 == best_t1)),
            ]
        )
    _status(f"best tau_phase1_s={best_t1!r} (eta={best_eta:.6f})")
    _write_rows(args, _OPT_HEADER, rows)
    return 0


_DIST_HEADER = ["k", "probability", "trials", "seed"]


def cmd_dist_k(args) -> int:
    config = scenario.validate(scenario.read_config(args.config))
    seed = _resolve_seed(args)
    dist = mc.phase1_count_distribution(config, args.trials, seed, workers=args.workers)
    _status(
        f"mean={dist.mean_count:.4f} mode={dist.mode} "
        f"std_err={dist.std_err_count:.4f} trials={dist.trials}"
    )
    rows = [
        [k, _fmt(float(p)), dist.trials, dist.seed] for k, p in enumerate(dist.pmf)
    ]
    _write_rows(args, _DIST_HEADER, rows)
    return 0


# --- argument parsing -----------------------------------------------------------


def _add_common(p, trials=True):
    p.add_argument("--config", required=True, help="scenario config file")
    p.add_argument("--out", default=None, help="CSV output path (default: stdout)")
    p.add_argument("--seed", type=_uint64, default=None,
                   help=f"rng seed (default: ${SEED_ENV_VAR} or {DEFAULT_SEED})")
    if trials:
        p.add_argument("--trials", type=_positive_int, default=DEFAULT_TRIALS,
                       help="Monte Carlo trials")
        p.add_argument("--workers", type=_positive_int, default=1, help="worker processes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarmrel",
        description="Reliability of two-phase (cellular + D2D relay) delivery to a UAV swarm",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="closed-form reliability breakdown")
    _add_common(p, trials=False)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="Monte Carlo reliability estimate")
    _add_common(p)
    p.add_argument("--protocol", default="proposed",
                   choices=[*_PROTOCOLS.keys(), "multi_round"])
    p.add_argument("--rounds", type=int, default=1, help="relay rounds (multi_round)")
    p.add_argument("--no-head", action="store_true",
                   help="multi_round without the head's pilot weighting")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="all protocols on one scenario")
    _add_common(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep", help="sweep one variable")
    _add_common(p)
    p.add_argument("--var", required=True, choices=SWEEPABLE)
    p.add_argument("--values", default=None, help="comma-separated values")
    p.add_argument("--start", type=float, default=None)
    p.add_argument("--stop", type=float, default=None)
    p.add_argument("--step", type=float, default=None)
    p.add_argument("--engine", default="both", choices=("analytic", "mc", "both"))
    p.add_argument("--protocol", default="proposed",
                   choices=[*_PROTOCOLS.keys(), "multi_round"])
    p.add_argument("--rounds", type=int, default=1)
    p.add_argument("--no-head", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize-tau", help="grid search the stage-split time")
    _add_common(p)
    p.add_argument("--start", type=float, required=True, help="first tau_phase1_s (s)")
    p.add_argument("--stop", type=float, required=True, help="last tau_phase1_s (s)")
    p.add_argument("--step", type=float, required=True, help="grid step (s)")
    p.add_argument("--engine", default="analytic", choices=("analytic", "mc"))
    p.set_defaults(func=cmd_optimize_tau)

    p = sub.add_parser("dist-k", help="histogram of cellular-stage decoder count")
    _add_common(p)
    p.set_defaults(func=cmd_dist_k)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        _status(f"config error: {exc}")
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        _status(f"config error: {exc}")
        return EXIT_CONFIG
    except (NumericalError, PlacementError) as exc:
        _status(f"numerical error: {exc}")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
