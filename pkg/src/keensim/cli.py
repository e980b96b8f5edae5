"""Command-line entry point: simulate, sweep, heatmap, validate.

All outputs are CSV with a leading ``#`` comment carrying the full resolved
parameter set and seed; no timestamps, so identical invocations produce
byte-identical files.  Worker count comes from KEENSIM_WORKERS (default:
machine parallelism).

Exit codes: 0 ok, 1 validation failure, 2 argument error, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .analytics import moment_checks
from .integrator import TRAJECTORY_COLUMNS, simulate_path
from .montecarlo import CrisisCriterion, sweep_1d, sweep_2d
from .params import (
    ConfigError,
    ConfigValidationError,
    header_line,
    load_config,
    resolve_config,
)

__all__ = ["run", "main"]


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".12g")
    return str(x)


class _UsageError(Exception):
    pass


def _parse_axis(spec: str):
    parts = spec.split(":")
    if len(parts) not in (4, 5):
        raise _UsageError(f"bad axis spec {spec!r}, expected name:start:stop:count[:log]")
    name = parts[0]
    try:
        start, stop = float(parts[1]), float(parts[2])
        count = int(parts[3])
    except ValueError:
        raise _UsageError(f"bad axis spec {spec!r}: numeric fields required")
    if count < 1:
        raise _UsageError(f"bad axis spec {spec!r}: count must be >= 1")
    if len(parts) == 5:
        if parts[4] != "log":
            raise _UsageError(f"bad axis spec {spec!r}: unknown suffix {parts[4]!r}")
        if start <= 0 or stop <= 0:
            raise _UsageError(f"bad axis spec {spec!r}: log spacing needs positive bounds")
        values = np.geomspace(start, stop, count)
    else:
        values = np.linspace(start, stop, count)
    return name, [float(v) for v in values]


def _load(args) -> tuple:
    overrides: dict[str, float] = {}
    if args.config:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as exc:
            raise _IoError(str(exc))
        p, cfg = load_config(text)
        # Re-extract as overrides so --set composes on top of the file.
        from . import params as _params
        overrides = {}
        for name in _params._PARAM_NAMES:
            overrides[name] = getattr(p, name)
        overrides.update(t_end=cfg.t_end, dt=cfg.dt, seed=cfg.seed,
                         record_stride=cfg.record_stride,
                         omega0=cfg.init_econ.omega, e0=cfg.init_econ.e,
                         m0=cfg.init_econ.m, ell0=cfg.init_econ.ell,
                         s0=cfg.init_market.s, mu0=cfg.init_market.mu)
    for item in args.set or []:
        if "=" not in item:
            raise _UsageError(f"bad --set {item!r}, expected key=value")
        key, _, value = item.partition("=")
        key = key.strip()
        value = value.strip()
        try:
            overrides[key] = int(value) if key in ("seed", "record_stride") else float(value)
        except ValueError:
            raise ConfigError(f"cannot parse value {value!r} for {key!r}")
        if key not in _known_keys():
            raise ConfigError(f"unknown key {key!r}")
    return resolve_config(overrides)


def _known_keys():
    from . import params as _params
    return set(_params._PARAM_NAMES) | set(_params._SIM_KEYS)


class _IoError(Exception):
    pass


def _write(path: str, text: str) -> None:
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise _IoError(str(exc))


def _cmd_simulate(args) -> int:
    p, cfg = _load(args)
    traj = simulate_path(cfg, p, args.run_index)
    head = header_line(p, cfg, run_index=args.run_index,
                       status=traj.status, reason=traj.reason, t_flag=traj.t_flag)
    lines = [head, ",".join(TRAJECTORY_COLUMNS)]
    for row in traj.samples:
        lines.append(",".join(format(v, ".12g") for v in row))
    _write(args.out, "\n".join(lines) + "\n")

    jumps_out = args.jumps_out or _default_jumps_path(args.out)
    jlines = [head, "t,kind,factor"]
    for ev in traj.jumps:
        jlines.append(f"{ev.t:.12g},{ev.kind},{ev.factor:.12g}")
    _write(jumps_out, "\n".join(jlines) + "\n")
    print(f"simulate: status={traj.status} samples={len(traj.samples)} "
          f"jumps={len(traj.jumps)} -> {args.out}")
    return 0


def _default_jumps_path(out: str) -> str:
    return (out[:-4] if out.endswith(".csv") else out) + ".jumps.csv"


def _criterion(args) -> CrisisCriterion:
    return CrisisCriterion(horizon=args.horizon)


def _cmd_sweep(args) -> int:
    p, cfg = _load(args)
    name, values = _parse_axis(args.axis)
    results = sweep_1d(name, values, p, cfg, _criterion(args), n_runs=args.runs)
    lines = [header_line(p, cfg, axis=args.axis, runs=args.runs),
             "param,value,n_runs,n_crisis,p_hat,ci_low,ci_high,n_blowup,mean_crisis_time"]
    for v, r in zip(values, results):
        if r.error:
            print(f"sweep point {name}={v}: {r.error}", file=sys.stderr)
        lines.append(",".join([name, _fmt(v), str(r.n_runs), str(r.n_crisis),
                               _fmt(r.p_hat), _fmt(r.ci_low), _fmt(r.ci_high),
                               str(r.n_blowup), _fmt(r.mean_crisis_time)]))
        print(f"sweep: {name}={_fmt(v)} p_hat={_fmt(r.p_hat)}", file=sys.stderr)
    _write(args.out, "\n".join(lines) + "\n")
    return 0


def _cmd_heatmap(args) -> int:
    p, cfg = _load(args)
    if len(args.axis) != 2:
        raise _UsageError("heatmap requires exactly two --axis options")
    n1, v1 = _parse_axis(args.axis[0])
    n2, v2 = _parse_axis(args.axis[1])
    grid = sweep_2d(n1, v1, n2, v2, p, cfg, _criterion(args), n_runs=args.runs)
    lines = [header_line(p, cfg, axis1=args.axis[0], axis2=args.axis[1], runs=args.runs),
             "p1,p1_value,p2,p2_value,n_runs,p_hat"]
    for a, row in zip(v1, grid):
        for b, r in zip(v2, row):
            if r.error:
                print(f"heatmap point {n1}={a} {n2}={b}: {r.error}", file=sys.stderr)
            lines.append(",".join([n1, _fmt(a), n2, _fmt(b),
                                   str(r.n_runs), _fmt(r.p_hat)]))
        print(f"heatmap: {n1}={_fmt(a)} row done", file=sys.stderr)
    _write(args.out, "\n".join(lines) + "\n")
    return 0


def _cmd_validate(args) -> int:
    p, cfg = _load(args)
    checks = moment_checks(p, seed=cfg.seed, n_paths=args.runs,
                           horizon=args.horizon)
    width = max(len(c.quantity) for c in checks)
    print(f"{'quantity':<{width}}  {'formula':>12}  {'simulated':>12}  "
          f"{'std_error':>12}  result")
    ok = True
    for c in checks:
        ok &= c.passed
        print(f"{c.quantity:<{width}}  {c.formula:>12.6g}  {c.simulated:>12.6g}  "
              f"{c.std_error:>12.3g}  {'pass' if c.passed else 'FAIL'}")
    return 0 if ok else 1


def run(argv) -> int:
    parser = argparse.ArgumentParser(
        prog="keensim",
        description="Simulate a credit-driven macroeconomy coupled to a "
                    "jump-diffusion asset market.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="flat key = value config file")
        sp.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a single parameter (repeatable, "
                             "composes left-to-right)")

    sp = sub.add_parser("simulate", help="run one path, write trajectory and jump CSVs")
    common(sp)
    sp.add_argument("--out", required=True)
    sp.add_argument("--jumps-out", help="jump log path (default: <out>.jumps.csv)")
    sp.add_argument("--run-index", type=int, default=0)
    sp.set_defaults(func=_cmd_simulate)

    sp = sub.add_parser("sweep", help="crisis probability along one parameter axis")
    common(sp)
    sp.add_argument("--axis", required=True, metavar="NAME:START:STOP:COUNT[:log]")
    sp.add_argument("--runs", type=int, default=500)
    sp.add_argument("--horizon", type=float, default=150.0)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_sweep)

    sp = sub.add_parser("heatmap", help="crisis probability over a 2-D grid")
    common(sp)
    sp.add_argument("--axis", action="append", required=True,
                    metavar="NAME:START:STOP:COUNT[:log]")
    sp.add_argument("--runs", type=int, default=300)
    sp.add_argument("--horizon", type=float, default=150.0)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_heatmap)

    sp = sub.add_parser("validate", help="analytic vs simulated moment table")
    common(sp)
    sp.add_argument("--runs", type=int, default=200, help="paths for the no-jump checks")
    sp.add_argument("--horizon", type=float, default=200.0)
    sp.set_defaults(func=_cmd_validate)

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0,) else 0
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 2
    except (ConfigError, ConfigValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except _IoError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
