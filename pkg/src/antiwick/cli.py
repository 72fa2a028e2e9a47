"""Command-line entry point.

Exit codes: 0 success, 1 failed acceptance criteria, 2 configuration error,
3 at least one row hit a numeric failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from . import acceptance, harness
from .errors import AntiWickError, ConfigError, ValidationError
from .quantize import assemble, export_operator
from .symbols import parse_symbol, ainfty_sweep

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def _config(args, semiclassical=False) -> harness.SweepConfig:
    if args.config:
        cfg = harness.load_config(args.config)
    else:
        suite = harness.semiclassical_suite() if semiclassical else harness.standard_suite()
        cfg = harness.SweepConfig(symbols=suite)
    changes = {}
    if args.workers is not None:
        changes["workers"] = args.workers
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.out is not None:
        changes["out_dir"] = args.out
    if args.format is not None:
        changes["out_format"] = args.format
    if getattr(args, "timings", False):
        changes["timings"] = True
    return dataclasses.replace(cfg, **changes)


def _emit(reports, cfg, stem):
    path = harness.emit_report(reports, cfg.out_dir, cfg.out_format, stem)
    print(path)
    return EXIT_NUMERIC if harness.failed(reports) else EXIT_OK


def cmd_sweep(args):
    cfg = _config(args)
    return _emit(harness.run_sweep(cfg), cfg, cfg.out_stem)


def cmd_gap(args):
    cfg = _config(args)
    return _emit(harness.run_gaps(cfg), cfg, "gap_estimates")


def cmd_semiclassical(args):
    cfg = _config(args, semiclassical=True)
    return _emit(harness.run_semiclassical(cfg, args.N), cfg, "semiclassical_report")


def cmd_quantize(args):
    cfg = _config(args)
    h = args.h if args.h is not None else cfg.h[-1]
    n_b = args.N_b if args.N_b is not None else cfg.ladder[-1]
    os.makedirs(cfg.out_dir, exist_ok=True)
    code = EXIT_OK
    for rec in cfg.symbols:
        try:
            op = assemble(parse_symbol(rec), h, n_b, route=cfg.grid.route)
        except (AntiWickError, ArithmeticError) as exc:
            print(f"{rec['id']}: {type(exc).__name__}: {exc}", file=sys.stderr)
            code = EXIT_NUMERIC
            continue
        path = os.path.join(cfg.out_dir, f"operator_{rec['id']}.txt")
        export_operator(op, path)
        print(path)
    return code


def cmd_ainfty(args):
    cfg = _config(args)
    centers, radii = acceptance.ainfty_sample(args.density)
    rows, code = [], EXIT_OK
    for rec in cfg.symbols:
        try:
            per_p, best = ainfty_sweep(parse_symbol(rec), centers, radii)
        except (AntiWickError, ArithmeticError) as exc:
            rows.append({"symbol_id": rec["id"], "error": f"{type(exc).__name__}: {exc}"})
            code = EXIT_NUMERIC
            continue
        rows.append({"symbol_id": rec["id"], "best_p": best.p,
                     "constant_estimate": harness._json_num(best.constant_estimate),
                     "per_p": {str(p): harness._json_num(r.constant_estimate) for p, r in per_p.items()},
                     "n_balls": best.n_balls_sampled,
                     "worst_ball": {"center": list(best.worst_ball.center), "radius": best.worst_ball.radius}
                     if best.worst_ball else None})
    os.makedirs(cfg.out_dir, exist_ok=True)
    path = os.path.join(cfg.out_dir, "ainfty.json")
    with open(path, "w") as fh:
        json.dump(rows, fh, indent=1, sort_keys=True)
        fh.write("\n")
    print(path)
    return code


def cmd_selftest(args):
    if args.workers:
        acceptance.set_workers(args.workers)
    results = acceptance.run_all(print, seed=args.seed or 0)
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    return EXIT_OK if passed == len(results) else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="sweep configuration (JSON)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--workers", type=int)
    common.add_argument("--seed", type=int)

    p = argparse.ArgumentParser(prog="antiwick", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sweep", parents=[common], help="assembly, eigensolve and estimators over h")
    s.add_argument("--timings", action="store_true", help="fill the runtime_ms column")
    s.set_defaults(fn=cmd_sweep)
    s = sub.add_parser("gap", parents=[common], help="gap estimators only")
    s.set_defaults(fn=cmd_gap)
    s = sub.add_parser("semiclassical", parents=[common], help="bottom versus the ball-sup functional")
    s.add_argument("--N", type=int, default=4, help="order of the h^N slack column")
    s.set_defaults(fn=cmd_semiclassical)
    s = sub.add_parser("quantize", parents=[common], help="assemble and export operators")
    s.add_argument("--h", type=float)
    s.add_argument("--N-b", dest="N_b", type=int)
    s.set_defaults(fn=cmd_quantize)
    s = sub.add_parser("ainfty", parents=[common], help="sampled A_p constants of each symbol")
    s.add_argument("--density", type=int, default=1, help="ball-sampling density multiplier")
    s.set_defaults(fn=cmd_ainfty)
    s = sub.add_parser("selftest", parents=[common], help="run the acceptance criteria")
    s.set_defaults(fn=cmd_selftest)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        where = f" (line {exc.line})" if exc.line else ""
        print(f"config error{where}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValidationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
