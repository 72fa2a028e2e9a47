"""Run the standard symbol suite over the default h sweep and print h-uniformity spreads."""
import argparse
from collections import defaultdict

from antiwick import harness


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default="configs/standard_suite.json")
    ap.add_argument("--out", default="results")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    cfg = harness.load_config(args.config)
    cfg.out_dir, cfg.workers = args.out, args.workers
    reports = harness.run_sweep(cfg)
    print(harness.emit_report(reports, cfg.out_dir, "csv", cfg.out_stem))
    print(harness.emit_report(reports, cfg.out_dir, "json", cfg.out_stem))

    ratios = defaultdict(list)
    for r in reports:
        if r.ratio is not None:
            ratios[r.symbol_id].append(r.ratio)
    print(f"{'symbol':>8} {'min ratio':>12} {'max ratio':>12} {'max/min':>8}")
    for sid, v in sorted(ratios.items()):
        print(f"{sid:>8} {min(v):12.6g} {max(v):12.6g} {max(v) / min(v):8.4f}")


if __name__ == "__main__":
    main()
