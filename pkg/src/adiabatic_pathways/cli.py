"""Command-line entry point.

Exit codes: 0 success, 1 configuration error, 2 scenario failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace

from . import bench
from .de import NoFeasibleCandidate
from .qcore import ValidationError

log = logging.getLogger("adiabatic_pathways")

DE_FLAGS = {"S": float, "C": float, "P": int, "N_c": int, "G_max": int, "workers": int}
DM_FLAGS = {"lambda0": float, "shrink": float, "max_trials": int, "G_max": int}


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text: str) -> list[int]:
    if "-" in text and "," not in text:
        lo, hi = text.split("-")
        return list(range(int(lo), int(hi) + 1))
    return [int(v) for v in text.split(",") if v.strip()]


def _scenario_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("scenario")
    g.add_argument("--config", help="JSON file with ScenarioConfig keys; flags override it")
    g.add_argument("--problem", choices=bench.PROBLEMS)
    g.add_argument("--n", type=int, help="qubit count (grover)")
    g.add_argument("--m", type=int, help="marked basis index (grover)")
    g.add_argument("--reduced", action="store_true", default=None,
                   help="propagate grover in the invariant two-state subspace")
    g.add_argument("--method", choices=bench.METHODS)
    g.add_argument("--T", type=float, help="total adiabatic time")
    g.add_argument("--alpha", type=float, help="weight of the energy term")
    g.add_argument("--M", type=int, help="time slices")
    g.add_argument("--R", type=int, help="repeats for stochastic methods")
    g.add_argument("--seed", type=int)
    g.add_argument("--out", dest="output", help="output directory")
    d = p.add_argument_group("differential evolution")
    for name, typ in DE_FLAGS.items():
        d.add_argument(f"--de-{name.replace('_', '-')}", dest=f"de_{name}", type=typ)
    m = p.add_argument_group("d-morph")
    for name, typ in DM_FLAGS.items():
        m.add_argument(f"--dm-{name.replace('_', '-')}", dest=f"dm_{name}", type=typ)


def build_config(args) -> bench.ScenarioConfig:
    top = {k: getattr(args, k, None) for k in
           ("problem", "n", "m", "reduced", "method", "T", "alpha", "M", "R", "seed", "output")}
    cfg = bench.load_config(args.config) if args.config else bench.ScenarioConfig()
    cfg = replace(cfg, **{k: v for k, v in top.items() if v is not None})
    de_opts = dict(cfg.de, **{k: getattr(args, f"de_{k}") for k in DE_FLAGS
                              if getattr(args, f"de_{k}", None) is not None})
    dm_opts = dict(cfg.dmorph, **{k: getattr(args, f"dm_{k}") for k in DM_FLAGS
                                  if getattr(args, f"dm_{k}", None) is not None})
    return replace(cfg, de=de_opts, dmorph=dm_opts)


def cmd_run(args) -> int:
    cfg = build_config(args).validate()
    res = bench.run_single(cfg)
    best = res.best.report
    print(json.dumps({"aggregate": res.aggregate(), "best": best.summary()}, indent=2))
    return 0


def cmd_grid(args) -> int:
    cfg = build_config(args)
    scan = bench.grid_scan(_floats(args.T_values), _floats(args.alpha_values), cfg.method, cfg.R,
                           base=cfg, workers=args.workers)
    _print_rows(scan)
    return 0


def cmd_min_time(args) -> int:
    cfg = build_config(args).validate()
    res = bench.min_time_scan(cfg, T0=args.T0, dT=args.dT, tol=args.tol, max_steps=args.max_steps)
    print(json.dumps({"T": res.T, "F": res.F, "F1": res.F1, "F2": res.F2,
                      "steps": len(res.steps), "dT": res.dT, "T0": res.T0}, indent=2))
    return 0


def cmd_scaling(args) -> int:
    cfg = build_config(args)
    methods = args.methods.split(",") if args.methods else [cfg.method]
    for method in methods:
        # scans default to one optimizer run per T unless --R is given
        scan = bench.qubit_scaling(method, _ints(args.n_range), cfg.alpha, base=cfg,
                                   dT_scale=args.dT_scale, tol=args.tol, max_steps=args.max_steps,
                                   R=args.R or 1)
        _print_rows(scan)
    return 0


def cmd_timing(args) -> int:
    cfg = build_config(args)
    scan = bench.timing_report(args.methods.split(","), _ints(args.n_range), R=args.repeats, base=cfg)
    _print_rows(scan)
    return 0


def _print_rows(scan) -> None:
    print(",".join(scan.columns))
    for row in scan.rows:
        print(",".join(f"{v:.6g}" if isinstance(v, float) else str(v) for v in row))


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adiabatic-pathways", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="one scenario")
    _scenario_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("grid-scan", help="(T, alpha) grid of mean F, F1, F2")
    _scenario_flags(p)
    p.add_argument("--T-values", default="1,2,3,4,5")
    p.add_argument("--alpha-values", default="0.05,0.1,0.2,0.5,1.0")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_grid)

    for name, func, helptext in (("min-time-scan", cmd_min_time, "minimal adiabatic time for one problem"),
                                 ("qubit-scaling", cmd_scaling, "minimal adiabatic time vs qubit count")):
        p = sub.add_parser(name, help=helptext)
        _scenario_flags(p)
        p.add_argument("--tol", type=float, default=1e-3)
        p.add_argument("--max-steps", type=int, default=200)
        if name == "min-time-scan":
            p.add_argument("--T0", type=float)
            p.add_argument("--dT", type=float)
        else:
            p.add_argument("--n-range", default="1-4")
            p.add_argument("--methods", help="comma-separated; defaults to --method")
            p.add_argument("--dT-scale", type=float, default=0.25, help="dT = scale * sqrt(N)")
        p.set_defaults(func=func)

    p = sub.add_parser("timing", help="wall time of DE vs D-MORPH on grover")
    _scenario_flags(p)
    p.add_argument("--methods", default="de,dmorph")
    p.add_argument("--n-range", default="1-3")
    p.add_argument("--repeats", type=int, default=3)
    p.set_defaults(func=cmd_timing)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (ValidationError, json.JSONDecodeError, TypeError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (bench.ScenarioFailure, NoFeasibleCandidate) as exc:
        print(f"scenario failed: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
