"""``bench`` command: run, tune, summarize, plot."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import bench, hypertune, registry


def _csv(kind):
    return lambda s: [kind(x) for x in s.split(",") if x]


def cmd_run(args) -> int:
    cfg = bench.ExperimentConfig.load(args.config) if args.config else bench.ExperimentConfig()
    if args.algorithms:
        cfg.algorithms = args.algorithms
    if args.sizes:
        cfg.sizes = args.sizes
    if args.instances:
        cfg.instances = args.instances
    cfg.workers = args.workers
    cfg.out_dir = args.out
    cfg.master_seed = bench.master_seed_from_env(cfg.master_seed)
    cfg = bench.ExperimentConfig.from_dict(cfg.to_dict())  # re-validate overrides
    results = bench.run_matrix(cfg)
    failed = [r for r in results if r.error]
    print(bench.summary_markdown(bench.summarize(results)))
    for r in failed:
        print(f"FAILED {r.algorithm} {r.instance_id}: {r.error}", file=sys.stderr)
    return 1 if failed else 0


def cmd_tune(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{args.algorithm}_n{args.n}"
    res = hypertune.tune(
        args.algorithm,
        args.n,
        n_trials=args.trials,
        time_limit=args.time_limit,
        seed=bench.master_seed_from_env(args.seed),
        method=args.method,
        log_path=out / f"{stem}_trials.jsonl",
    )
    hypertune.save_best(out / f"{stem}_best.json", args.algorithm, args.n, res.best_config)
    print(f"best loss {res.best_loss:.6g} after {len(res.trials)} trials: {res.best_config}")
    return 0 if any(t.error is None for t in res.trials) else 1


def cmd_summarize(args) -> int:
    rows = bench.summarize(bench.load_results(args.inp))
    text = bench.summary_markdown(rows) if args.format == "md" else bench.summary_csv(rows)
    sys.stdout.write(text)
    return 0


def cmd_plot(args) -> int:
    from .report_plots import PlotSpec, render

    path = render(PlotSpec(args.metric, args.inp, args.out, args.kind))
    print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bench", description="Adaptive VQA benchmark harness.")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run the experiment matrix")
    r.add_argument("--config", help="ExperimentConfig JSON")
    r.add_argument("--out", required=True, help="output directory")
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--algorithms", type=_csv(str), help=f"subset of {','.join(registry.ALGORITHMS)}")
    r.add_argument("--sizes", type=_csv(int), help="e.g. 4,8")
    r.add_argument("--instances", type=int, help="instances per cell")
    r.set_defaults(func=cmd_run)

    t = sub.add_parser("tune", help="tune one algorithm on the MaxCut ER tuning instance")
    t.add_argument("--algorithm", required=True, choices=registry.ALGORITHMS)
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--trials", type=int, default=50)
    t.add_argument("--time-limit", type=float, default=None, help="seconds")
    t.add_argument("--method", choices=("tpe", "random"), default="tpe")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--out", default="tuning", help="directory for the trial log and best config")
    t.set_defaults(func=cmd_tune)

    s = sub.add_parser("summarize", help="summarize a results directory")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--format", choices=("md", "csv"), default="md")
    s.set_defaults(func=cmd_summarize)

    pl = sub.add_parser("plot", help="grouped bar chart from summary.csv")
    pl.add_argument("--in", dest="inp", required=True)
    pl.add_argument("--metric", choices=("ratio", "gates", "cnot", "evals"), default="ratio")
    pl.add_argument("--kind", default=None, help="restrict to one problem kind")
    pl.add_argument("--out", required=True)
    pl.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"bench: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
