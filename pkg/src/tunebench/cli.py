"""Command-line entry point: ``tunebench <subcommand> [options]``."""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from pathlib import Path

from .bench import (
    ExperimentConfig,
    emit_reports,
    run_comparison,
    run_random_search,
    run_threshold_study,
    write_surface_csv,
    write_trace_csv,
)
from .bo import VARIANTS, BoConfig, run_bo
from .params import ParamBox
from .xor import DEFAULT_EPOCHS, XorObjective

log = logging.getLogger("tunebench")


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _ints(text: str) -> list[int]:
    """Parse ``0-4,7,9`` into ``[0, 1, 2, 3, 4, 7, 9]``."""
    out = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        m = re.fullmatch(r"(\d+)-(\d+)", part)
        out.extend(range(int(m[1]), int(m[2]) + 1) if m else [int(part)])
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid-n", type=int, default=100, help="grid points per dimension (default: 100)")
    common.add_argument("--epochs", type=int, default=DEFAULT_EPOCHS, help="training epochs per evaluation")
    common.add_argument("--seed", type=int, default=0, help="experiment seed")
    common.add_argument("--out", type=Path, default=None, help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    bo_opts = argparse.ArgumentParser(add_help=False)
    bo_opts.add_argument("--budget", type=int, default=20, help="max objective evaluations (default: 20)")
    bo_opts.add_argument("--gamma", type=float, default=1.0, help="confidence-bound weight (default: 1)")
    bo_opts.add_argument("--acquisition", choices=VARIANTS, default="standard",
                         help="paper: mean+gamma*sd, standard: mean-gamma*sd (default: standard)")

    parser = argparse.ArgumentParser(prog="tunebench", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("tune", parents=[common, bo_opts], help="single Bayesian-optimization run")
    sub.add_parser("random-search", parents=[common, bo_opts], help="single random grid search run")
    cmp_ = sub.add_parser("compare", parents=[common, bo_opts], help="paired BO vs random search over seeds")
    cmp_.add_argument("--seeds", type=_ints, default=None, help="seed list, e.g. 0-49 or 1,2,5")
    cmp_.add_argument("--rs-budget", type=int, default=None, help="random search budget (default: --budget)")
    cmp_.add_argument("--surface-grid-n", type=int, default=None, help="also dump objective surfaces")
    cmp_.add_argument("--workers", type=int, default=None, help="worker processes (default: TUNEBENCH_THREADS or 1)")
    th = sub.add_parser("threshold-study", parents=[common], help="random search evaluations needed per MSE threshold")
    th.add_argument("--thresholds", type=_floats, default=[0.190, 0.185, 0.177])
    th.add_argument("--max-evals", type=int, default=10_000)
    th.add_argument("--max-seconds", type=float, default=None, help="wall-clock cap")
    th.add_argument("--chunk", type=int, default=256, help="points trained together (1 = strictly sequential)")
    surf = sub.add_parser("surface", parents=[common], help="dump the objective over a grid")
    surf.set_defaults(grid_n=25)
    return parser


def _box(args) -> ParamBox:
    return ParamBox(grid_n=args.grid_n)


def _print_record(name: str, rec) -> None:
    p = rec.best_point
    print(f"{name}: best mse {rec.best_value:.4f} at alpha={p.alpha:.4f} theta={p.theta:.4f} "
          f"after {rec.n_evals} evaluations, {rec.total_time:.3f} s ({rec.terminated_by})")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _dispatch(args)
    except Exception as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return 1


def _dispatch(args) -> int:
    box = _box(args)
    if args.command == "surface":
        out = args.out or Path(".")
        out.mkdir(parents=True, exist_ok=True)
        path = write_surface_csv(box, XorObjective(args.seed, args.epochs), out / f"surface_{args.seed}.csv")
        print(path)
        return 0

    if args.command == "threshold-study":
        rows = run_threshold_study(box, args.thresholds, XorObjective(args.seed, args.epochs), args.max_evals,
                                   args.seed, args.max_seconds, args.chunk)
        result = [{"threshold": r.threshold, "evals": r.evals, "time_s": r.time_s} for r in rows]
        for r in rows:
            status = f"{r.evals} evaluations, {r.time_s:.1f} s" if r.reached else "not reached"
            print(f"{r.threshold:.3f}: {status}")
        if args.out:
            args.out.mkdir(parents=True, exist_ok=True)
            (args.out / f"threshold_{args.seed}.json").write_text(json.dumps(result, indent=2))
        return 0

    bo_cfg = BoConfig(budget=args.budget, gamma=args.gamma, box=box, seed=args.seed,
                      acquisition_variant=args.acquisition)
    if args.command in ("tune", "random-search"):
        objective = XorObjective(args.seed, args.epochs)
        if args.command == "tune":
            rec, name = run_bo(bo_cfg, objective), "bo"
        else:
            rec, name = run_random_search(args.budget, box, args.seed, objective), "random"
        _print_record(name, rec)
        if args.out:
            args.out.mkdir(parents=True, exist_ok=True)
            write_trace_csv(rec, args.out / f"trace_{name}_{args.seed}.csv")
        return 0

    config = ExperimentConfig(bo=bo_cfg, rs_budget=args.rs_budget or args.budget, epochs=args.epochs,
                              seeds=args.seeds or [args.seed], output_dir=None)
    report = run_comparison(config, workers=args.workers, write=False)
    if args.out:
        config.output_dir = str(args.out)
        emit_reports(report, args.out, surface_grid_n=args.surface_grid_n)
    agg = report.aggregates()
    for method in ("bo", "random"):
        a = agg[method]
        print(f"{method:>6}: median best {a['median_best_mse']:.4f}  mean best {a['mean_best_mse']:.4f}  "
              f"median evals {a['median_evals']:g}  median time {a['median_time_s']:.3f} s")
    print(f"win rate {report.win_rate:.2f} over {len(report.completed)} seeds")
    for f in report.failures:
        print(f"seed {f.seed} failed: {f.error}", file=sys.stderr)
    return 1 if report.failures else 0


if __name__ == "__main__":
    sys.exit(main())
