"""Command-line entry point: ``secdelay analytic|simulate|sweep|preset``."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from . import analytic
from .core import (
    DEFAULT_ALPHA,
    DEFAULT_LAMBDA_E,
    DEFAULT_LAMBDA_L,
    DEFAULT_P,
    DEFAULT_R0,
    DEFAULT_R_E,
    DEFAULT_R_T,
    DEFAULT_XI,
    RateConfig,
    ScenarioConfig,
    SystemParams,
    Traffic,
)
from .experiments import PRESETS, ConfigError, figure_preset, parse_config, run_sweep, write_csv
from .simulator.attempts import Mode
from .simulator.replicate import DEFAULT_HORIZON, DEFAULT_MESSAGES, replicate


def _add_point_args(ap: argparse.ArgumentParser) -> None:
    g = ap.add_argument_group("operating point")
    g.add_argument("--lambda-l", type=float, default=DEFAULT_LAMBDA_L, help="legitimate density")
    g.add_argument("--lambda-e", type=float, default=DEFAULT_LAMBDA_E, help="eavesdropper density")
    g.add_argument("--r0", type=float, default=DEFAULT_R0, help="link distance")
    g.add_argument("--alpha", type=float, default=DEFAULT_ALPHA, help="path-loss exponent (> 2)")
    g.add_argument("-p", "--p", type=float, default=DEFAULT_P, help="ALOHA access probability")
    g.add_argument("--xi", type=float, default=DEFAULT_XI, help="arrival probability per slot")
    g.add_argument("--R-t", dest="R_t", type=float, default=DEFAULT_R_T, help="codeword rate")
    g.add_argument("--R-e", dest="R_e", type=float, default=DEFAULT_R_E, help="redundancy rate")
    g.add_argument("--traffic", choices=[t.value for t in Traffic], default="backlogged")
    g.add_argument("--split", action="store_true", help="send each message as two packets")


def _add_sim_args(ap: argparse.ArgumentParser, reps_default: int | None) -> None:
    g = ap.add_argument_group("simulation")
    g.add_argument("--seed", type=int, default=None, help="master seed")
    g.add_argument("--reps", type=int, default=reps_default, help="independent replications")
    g.add_argument("--torus-side", type=float, default=None, help="torus side (default 40 r0)")
    g.add_argument("--horizon", type=int, default=None, help="slots per dynamic replication")
    g.add_argument("--warmup", type=int, default=None, help="warm-up slots (default horizon/5)")
    g.add_argument("--messages", type=int, default=None, help="messages per backlogged replication")
    g.add_argument("--mode", choices=[m.value for m in Mode], default=None)
    g.add_argument("--workers", type=int, default=1, help="worker processes")


def _point(args):
    params = SystemParams(
        lambda_l=args.lambda_l, lambda_e=args.lambda_e, r0=args.r0,
        alpha=args.alpha, p=args.p, xi=args.xi,
    )
    return params, RateConfig(R_t=args.R_t, R_e=args.R_e), ScenarioConfig(args.traffic, args.split)


def _fmt(x) -> str:
    return "" if x is None else format(x, ".10g")


def cmd_analytic(args) -> int:
    params, rates, scenario = _point(args)
    res = analytic.evaluate(params, rates, scenario)
    print(f"scenario        {scenario.label}")
    for k, v in res.as_dict().items():
        if v is not None:
            print(f"{k:<15} {_fmt(v)}")
    return 0


def cmd_simulate(args) -> int:
    params, rates, scenario = _point(args)
    summary = replicate(
        params, rates, scenario,
        n_reps=args.reps,
        master_seed=0 if args.seed is None else args.seed,
        mode=args.mode or Mode.PHYSICAL,
        torus_side=args.torus_side,
        n_messages=args.messages or DEFAULT_MESSAGES,
        horizon=args.horizon or DEFAULT_HORIZON,
        warmup=args.warmup,
        workers=args.workers,
    )
    res = analytic.evaluate(params, rates, scenario)
    print(f"scenario        {scenario.label}")
    print(f"{'metric':<15} {'analytic':>12} {'sim_mean':>12} {'ci95_lo':>12} {'ci95_hi':>12}")
    rows = [
        ("mean_delay", res.mean_delay, summary.delay),
        ("secrecy_outage", res.secrecy_outage, summary.outage),
        ("q_star", res.active_probability, summary.activity),
        ("p_cf", res.connection_failure, summary.connection_failure),
    ]
    for name, a, est in rows:
        print(f"{name:<15} {_fmt(a):>12} {_fmt(est.mean):>12} {_fmt(est.lo):>12} {_fmt(est.hi):>12}")
    print(f"replications    {summary.n_reps} ({summary.unstable_reps} unstable)")
    print(f"censored_frac   {_fmt(summary.censored_fraction)}")
    if summary.unreliable:
        print("warning: some replications did not drain their queue; delay is unreliable",
              file=sys.stderr)
    return 0


def _override(cfg, args):
    changes = {}
    for flag, fld in (("seed", "seed"), ("reps", "replications"), ("torus_side", "torus_side"),
                      ("horizon", "horizon"), ("warmup", "warmup"), ("messages", "n_messages")):
        value = getattr(args, flag)
        if value is not None:
            changes[fld] = value
    if args.mode is not None:
        changes["mode"] = Mode(args.mode)
    return replace(cfg, **changes) if changes else cfg


def _run_and_write(cfg, args) -> int:
    rows = run_sweep(_override(cfg, args), workers=args.workers)
    if args.out == "-":
        write_csv(rows, sys.stdout)
    else:
        write_csv(rows, args.out)
        print(f"wrote {len(rows)} rows to {args.out}", file=sys.stderr)
    return 0


def cmd_sweep(args) -> int:
    with open(args.config) as fh:
        text = fh.read()
    try:
        cfg = parse_config(text)
    except ConfigError as err:
        raise ConfigError(f"{args.config}: {err}") from None
    return _run_and_write(cfg, args)


def cmd_preset(args) -> int:
    return _run_and_write(figure_preset(args.name), args)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="secdelay",
        description="Delay and secrecy outage of random access networks with eavesdroppers.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analytic", help="evaluate the closed forms at one point")
    _add_point_args(a)
    a.set_defaults(func=cmd_analytic)

    s = sub.add_parser("simulate", help="Monte Carlo estimate at one point, with 95%% CIs")
    _add_point_args(s)
    _add_sim_args(s, reps_default=20)
    s.set_defaults(func=cmd_simulate)

    w = sub.add_parser("sweep", help="run a sweep file and write CSV")
    w.add_argument("--config", required=True, help="sweep file (key = value lines)")
    w.add_argument("--out", required=True, help="CSV path, or - for stdout")
    _add_sim_args(w, reps_default=None)
    w.set_defaults(func=cmd_sweep)

    f = sub.add_parser("preset", help="run a figure preset and write CSV")
    f.add_argument("--name", required=True, help=f"one of {', '.join(PRESETS)}")
    f.add_argument("--out", required=True, help="CSV path, or - for stdout")
    _add_sim_args(f, reps_default=None)
    f.set_defaults(func=cmd_preset)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if getattr(args, "reps", None) is not None and args.reps < (1 if args.command == "simulate" else 0):
            raise ValueError(f"--reps={args.reps} is out of range")
        return args.func(args)
    except (ValueError, OSError) as err:
        print(f"secdelay: error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
