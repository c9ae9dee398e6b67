"""Command-line entry point: ``arident theory|simulate|fit|batch|series|reproduce``.

Exit codes: 0 success, 1 validation error, 2 numerical failure,
3 acceptance-band failure.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import replace

from .errors import ConfigError, NumericalError, ValidationError
from .least_squares import batch_estimate, fit_ar, write_batch_csv
from .moments import stationary_covariance, write_covariance_csv
from .noise import NoiseSpec, SeededStream
from .repro import (
    ScenarioConfig,
    cmd_reproduce,
    cmd_series,
    cmd_theory,
    load_config,
    run_scenario,
    select,
)
from .system import simulate, write_trajectory_csv

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_BANDS = 0, 1, 2, 3

# flag name -> ScenarioConfig field (noise flags handled separately)
_SIMPLE_FLAGS = {
    "n": "n",
    "alpha": "alpha",
    "kappa": "kappa",
    "order": "order",
    "seed": "seed",
    "burn_in": "burn_in",
}


def _add_common(p):
    p.add_argument("--config", help="scenario config file (bundled names such as paper.cfg also work)")
    p.add_argument("--scenario", help="scenario name inside --config")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--delta2", type=float, help="variance of q (of eta for colored q)")
    p.add_argument("--xi2", type=float, help="variance of v")
    p.add_argument("--qbar", type=float)
    p.add_argument("--vbar", type=float)
    p.add_argument("--noise", help="white | colored:<coeff>")
    p.add_argument("--n", type=int)
    p.add_argument("--alpha", type=int)
    p.add_argument("--kappa", type=int)
    p.add_argument("--order", type=int, choices=(1, 2))
    p.add_argument("--seed", type=int)
    p.add_argument("--burn-in", dest="burn_in", type=int)
    p.add_argument("--out", help="output path (directory for reproduce)")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--workers", type=int, default=None, help="thread count for batches")


def build_parser():
    parser = argparse.ArgumentParser(prog="arident", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("theory", "closed-form moments and optimal AR parameters"),
        ("simulate", "simulate one trajectory (CSV t,y)"),
        ("fit", "least-squares AR fit of one simulated trajectory"),
        ("batch", "kappa-batch least-squares statistics"),
        ("series", "per-batch estimates with running mean/variance"),
        ("reproduce", "run every scenario of a config file and check bands"),
    ]:
        _add_common(sub.add_parser(name, help=help_))
    return parser


def scenario_from_args(args, mode):
    """Scenario from ``--config/--scenario`` with command-line flags layered on top."""
    if args.config:
        scenarios = load_config(args.config)
        if args.scenario:
            cfg = select(scenarios, args.scenario)
        elif len(scenarios) == 1:
            cfg = scenarios[0]
        else:
            raise ConfigError("config has several scenarios; pick one with --scenario", "scenario")
    else:
        if args.lam is None:
            raise ConfigError("required without --config", "--lambda")
        cfg = ScenarioConfig(name=args.scenario or "cli", lam=args.lam, mode="theory")

    updates = {k: getattr(args, flag) for flag, k in _SIMPLE_FLAGS.items() if getattr(args, flag) is not None}
    if args.lam is not None:
        updates["lam"] = args.lam
    q, v = cfg.q, cfg.v
    try:
        if any(x is not None for x in (args.noise, args.delta2, args.qbar)):
            coeff = q.coeff if args.noise is None else NoiseSpec.parse_kind(args.noise)
            mean = q.mean if args.qbar is None else args.qbar
            if coeff is not None and args.qbar is None:
                mean = 0.0
            var = q.variance if args.delta2 is None else args.delta2
            q = NoiseSpec(mean, var, coeff)
        if args.xi2 is not None or args.vbar is not None:
            v = NoiseSpec.white(
                v.mean if args.vbar is None else args.vbar,
                v.variance if args.xi2 is None else args.xi2,
            )
    except ValidationError as exc:
        raise ConfigError(str(exc), "--noise/--delta2/--xi2") from exc
    updates.update(q=q, v=v, mode=mode)
    if mode != "batch" and "kappa" not in updates:
        updates["kappa"] = max(cfg.kappa, 1)
    return replace(cfg, **updates)


def _emit(text, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run(args):
    cmd = args.command
    fmt = args.format

    if cmd == "theory":
        cfg = scenario_from_args(args, "theory")
        if fmt == "csv":
            buf = io.StringIO()
            write_covariance_csv(stationary_covariance(cfg.params, 2), buf)
            _emit(buf.getvalue(), args.out)
            return EXIT_OK
        report = cmd_theory(cfg)
        if report.error:
            return _report_error(report)
        _emit(report.to_json() + "\n", args.out)
        return EXIT_OK

    if cmd == "simulate":
        cfg = scenario_from_args(args, "theory")
        traj = simulate(cfg.params, cfg.effective_n, cfg.burn_in, SeededStream(cfg.seed, 0))
        if fmt == "json":
            _emit(json.dumps({"t": list(range(1, len(traj) + 1)),
                              "y": [float(y) for y in traj.values]}) + "\n", args.out)
        else:
            if args.out:
                write_trajectory_csv(traj, args.out)
            else:
                write_trajectory_csv(traj, sys.stdout)
        return EXIT_OK

    if cmd == "fit":
        cfg = scenario_from_args(args, "single")
        if args.config is None:
            traj = simulate(cfg.params, cfg.effective_n, cfg.burn_in, SeededStream(cfg.seed, 0))
            est = fit_ar(traj, cfg.order)
            _emit(json.dumps(est.to_dict(), indent=2) + "\n", args.out)
            return EXIT_OK
        report = run_scenario(cfg)
        if report.error:
            return _report_error(report)
        _emit(report.to_json() + "\n", args.out)
        return EXIT_OK if report.passed else EXIT_BANDS

    if cmd == "batch":
        cfg = scenario_from_args(args, "batch")
        summary = batch_estimate(cfg.params, cfg.order, cfg.effective_n, cfg.kappa, cfg.seed,
                                 cfg.burn_in, workers=args.workers)
        if fmt == "csv":
            if args.out:
                write_batch_csv(summary, args.out)
            else:
                write_batch_csv(summary, sys.stdout)
        else:
            _emit(summary.to_json(indent=2) + "\n", args.out)
        return EXIT_OK

    if cmd == "series":
        cfg = scenario_from_args(args, "batch")
        text = cmd_series(cfg, workers=args.workers)
        _emit(text, args.out)
        return EXIT_OK

    if cmd == "reproduce":
        if not args.config:
            raise ConfigError("reproduce needs a config file", "--config")
        scenarios = load_config(args.config)
        if args.scenario:
            scenarios = [select(scenarios, args.scenario)]
        reports, status = cmd_reproduce(scenarios, args.out, batch_workers=args.workers)
        for r in reports:
            verdict = "ERROR" if r.error else ("PASS" if r.passed else "FAIL")
            print(f"{verdict:5s} {r.scenario.name}")
            for c in r.checks:
                print(f"      [{'ok' if c.passed else 'FAIL'}] {c.name}: {c.detail}")
            if r.error:
                print(f"      {r.error_kind} error: {r.error}")
            for note in r.notes:
                print(f"      note: {note}")
        return status

    raise AssertionError(cmd)


def _report_error(report):
    print(f"error: {report.error}", file=sys.stderr)
    return EXIT_VALIDATION if report.error_kind == "validation" else EXIT_NUMERICAL


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
