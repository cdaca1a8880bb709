"""Experiment matrix runner and result tables."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

from . import registry
from .hypertune import load_best
from .param_opt import BudgetLedger
from .problems import ProblemKind, ProblemSpec, brute_force_solve, generate, qubo_to_ising
from .results import AlgorithmResult
from .rngcore import derive_seed

log = logging.getLogger(__name__)

SEED_ENV = "BENCH_MASTER_SEED"
ALGORITHM_LABELS = {"evqe": "EVQE", "vans": "VAns", "ravqe": "RA-VQE", "qaoa": "QAOA"}


@dataclass
class ExperimentConfig:
    """What to run.

    ``hyperparams`` maps algorithm -> size (as str or int) -> either a params
    dict or a path to a best-config JSON written by ``bench tune``. Missing
    entries fall back to the published tuned values for the nearest size.
    """

    kinds: list[str] = field(default_factory=lambda: [k.value for k in ProblemKind])
    sizes: list[int] = field(default_factory=lambda: [4, 8])
    instances: int = 10
    master_seed: int = 0
    algorithms: list[str] = field(default_factory=lambda: list(registry.ALGORITHMS))
    hyperparams: dict[str, dict[str, Any]] = field(default_factory=dict)
    global_cap: int = 10_000
    per_structure_cap: int = 50
    out_dir: str | None = None
    workers: int = 1

    def __post_init__(self):
        if self.instances < 1:
            raise ValueError("instances per cell must be >= 1")
        self.kinds = [ProblemKind(k).value for k in self.kinds]
        self.sizes = [int(n) for n in self.sizes]
        for a in self.algorithms:
            registry.get(a)

    def params_for(self, algorithm: str, n: int) -> dict[str, Any]:
        table = self.hyperparams.get(algorithm, {})
        entry = table.get(str(n), table.get(n))
        if entry is None:
            return registry.published(algorithm, n)
        if isinstance(entry, (str, Path)):
            return dict(load_best(entry)["params"])
        return dict(entry)

    @classmethod
    def from_dict(cls, d: dict) -> ExperimentConfig:
        return cls(**d)

    @classmethod
    def load(cls, path: str | Path) -> ExperimentConfig:
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return asdict(self)


def instance_seed(kind: str, n: int, index: int, master_seed: int) -> int:
    return derive_seed(kind, n, index, master_seed)


def algorithm_seed(algorithm: str, inst_seed: int) -> int:
    return derive_seed(algorithm, inst_seed)


def instance_id(kind: str, n: int, index: int) -> str:
    return f"{kind}-n{n}-{index:02d}"


@dataclass(frozen=True)
class _Cell:
    kind: str
    n: int
    index: int
    master_seed: int
    runs: tuple  # (algorithm, params) pairs
    global_cap: int
    per_structure_cap: int


def _run_cell(cell: _Cell) -> list[AlgorithmResult]:
    """One instance, every enabled algorithm, fresh ledger each."""
    iid = instance_id(cell.kind, cell.n, cell.index)
    seed = instance_seed(cell.kind, cell.n, cell.index, cell.master_seed)
    try:
        model = qubo_to_ising(generate(ProblemSpec(cell.kind, cell.n, seed)))
        truth = brute_force_solve(model)
    except Exception as exc:
        msg = f"{type(exc).__name__}: {exc}"
        return [AlgorithmResult.failed(a, iid, msg) for a, _ in cell.runs]
    out = []
    for alg, params in cell.runs:
        ledger = BudgetLedger(cell.global_cap, cell.per_structure_cap)
        try:
            res = registry.get(alg).run(model, params, algorithm_seed(alg, seed), ledger, truth, iid)
        except Exception as exc:
            log.error("%s on %s failed: %s", alg, iid, exc)
            log.debug("%s", traceback.format_exc())
            res = AlgorithmResult.failed(alg, iid, f"{type(exc).__name__}: {exc}", truth.min_energy)
        res.meta.update(kind=cell.kind, n=cell.n, instance=cell.index, hyperparams=params)
        out.append(res)
    return out


def sort_key(r: AlgorithmResult) -> tuple:
    order = registry.ALGORITHMS.index(r.algorithm) if r.algorithm in registry.ALGORITHMS else len(registry.ALGORITHMS)
    return (r.meta.get("kind", ""), r.meta.get("n", 0), r.meta.get("instance", 0), order, r.instance_id)


def run_matrix(cfg: ExperimentConfig) -> list[AlgorithmResult]:
    """Run every (kind, size, instance, algorithm) combination; failures are recorded, not raised."""
    cells = []
    for kind in cfg.kinds:
        for n in cfg.sizes:
            runs = tuple((a, cfg.params_for(a, n)) for a in cfg.algorithms)
            for i in range(cfg.instances):
                cells.append(_Cell(kind, n, i, cfg.master_seed, runs, cfg.global_cap, cfg.per_structure_cap))
    results: list[AlgorithmResult] = []
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            for batch in pool.map(_run_cell, cells):
                results += batch
    else:
        for cell in cells:
            log.info("running %s", instance_id(cell.kind, cell.n, cell.index))
            results += _run_cell(cell)
    results.sort(key=sort_key)
    if cfg.out_dir:
        write_outputs(results, cfg.out_dir)
    return results


# -- aggregation --------------------------------------------------------------


def _mean_std(xs: Sequence[float]) -> tuple[float, float]:
    """Mean and sample std; fsum keeps both independent of input order."""
    if not xs:
        return math.nan, math.nan
    mean = math.fsum(xs) / len(xs)
    if len(xs) == 1:
        return mean, 0.0
    return mean, math.sqrt(math.fsum((x - mean) ** 2 for x in xs) / (len(xs) - 1))


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


SUMMARY_FIELDS = [
    "kind", "n", "algorithm", "runs", "failures", "undefined_ratio",
    "ratio_mean", "ratio_std", "expectation_mean", "expectation_std",
    "gates", "cnot", "depth", "evals_mean", "time_mean", "time_std",
]


def summarize(results: Iterable[AlgorithmResult]) -> list[dict[str, Any]]:
    """Per (kind, n, algorithm): mean and sample std of ratio, expectation and time; integer mean gate counts.

    Failed runs are counted but excluded; undefined ratios are excluded from the ratio mean and counted.
    """
    results = list(results)
    if not results:
        raise ValueError("nothing to summarize")
    groups: dict[tuple, list[AlgorithmResult]] = {}
    for r in results:
        key = (r.meta.get("kind", ""), r.meta.get("n", 0), r.algorithm)
        groups.setdefault(key, []).append(r)
    order = {a: i for i, a in enumerate(registry.ALGORITHMS)}
    rows = []
    for key in sorted(groups, key=lambda k: (k[0], k[1], order.get(k[2], 99), k[2])):
        rs = groups[key]
        ok = [r for r in rs if r.error is None]
        ratios = [r.approximation_ratio for r in ok if r.approximation_ratio is not None]
        rm, rsd = _mean_std(ratios)
        em, esd = _mean_std([r.expectation for r in ok])
        tm, tsd = _mean_std([r.wall_time for r in ok])

        def int_mean(attr):
            m, _ = _mean_std([getattr(r, attr) for r in ok])
            return _round_half_up(m) if ok else None

        evals, _ = _mean_std([float(r.evals_used) for r in ok])
        rows.append(
            dict(
                kind=key[0], n=key[1], algorithm=key[2], runs=len(rs), failures=len(rs) - len(ok),
                undefined_ratio=len(ok) - len(ratios), ratio_mean=rm, ratio_std=rsd,
                expectation_mean=em, expectation_std=esd, gates=int_mean("gates"), cnot=int_mean("cnot"),
                depth=int_mean("depth"), evals_mean=evals, time_mean=tm, time_std=tsd,
            )
        )
    return rows


# -- output -----------------------------------------------------------------


def results_jsonl(results: Sequence[AlgorithmResult]) -> str:
    """One result per line, wall time stripped so reruns are byte-identical."""
    lines = []
    for r in results:
        d = r.to_dict()
        d.pop("wall_time")
        lines.append(json.dumps(d, sort_keys=True))
    return "".join(line + "\n" for line in lines)


def timings_jsonl(results: Sequence[AlgorithmResult]) -> str:
    return "".join(
        json.dumps({"algorithm": r.algorithm, "instance_id": r.instance_id, "wall_time": r.wall_time}) + "\n"
        for r in results
    )


def load_results(path: str | Path) -> list[AlgorithmResult]:
    """Read ``results.jsonl`` (a file or the directory holding it), re-attaching wall times if present."""
    path = Path(path)
    if path.is_dir():
        path = path / "results.jsonl"
    times = {}
    tpath = path.with_name("timings.jsonl")
    if tpath.exists():
        for line in tpath.read_text().splitlines():
            t = json.loads(line)
            times[(t["algorithm"], t["instance_id"])] = t["wall_time"]
    out = []
    for line in path.read_text().splitlines():
        if not line.strip():
            continue
        d = json.loads(line)
        d.setdefault("wall_time", times.get((d["algorithm"], d["instance_id"]), math.nan))
        out.append(AlgorithmResult.from_dict(d))
    return out


def summary_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=SUMMARY_FIELDS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: ("" if row[k] is None else row[k]) for k in SUMMARY_FIELDS})
    return buf.getvalue()


def read_summary_csv(path: str | Path) -> list[dict[str, Any]]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    for row in rows:
        for k, v in row.items():
            if k in ("kind", "algorithm"):
                continue
            row[k] = None if v == "" else float(v)
    return rows


def _pm(mean: float, std: float, digits: int) -> str:
    if mean is None or math.isnan(mean):
        return "n/a"
    return f"{mean:.{digits}f} ± {std:.{digits}f}"


def summary_markdown(rows: Sequence[dict]) -> str:
    """One table per problem kind: N, Algorithm, Approx. Ratio, Expectation, Gates, Cnot, Time [s]."""
    out = []
    notes = []
    for kind in sorted({r["kind"] for r in rows}):
        out.append(f"### {kind}\n")
        out.append("| N | Algorithm | Approx. Ratio | Expectation | Gates | Cnot | Time [s] |")
        out.append("|---|---|---|---|---|---|---|")
        for r in (r for r in rows if r["kind"] == kind):
            label = ALGORITHM_LABELS.get(r["algorithm"], r["algorithm"])
            mark = ""
            if r["undefined_ratio"] or r["failures"]:
                notes.append(
                    f"[{len(notes) + 1}] {kind} N={r['n']} {label}: "
                    f"{r['undefined_ratio']} undefined ratio(s), {r['failures']} failed run(s)"
                )
                mark = f" [{len(notes)}]"
            out.append(
                f"| {r['n']} | {label}{mark} | {_pm(r['ratio_mean'], r['ratio_std'], 2)} "
                f"| {_pm(r['expectation_mean'], r['expectation_std'], 2)} | {r['gates']} | {r['cnot']} "
                f"| {_pm(r['time_mean'], r['time_std'], 1)} |"
            )
        out.append("")
    if notes:
        out += notes + [""]
    return "\n".join(out)


def write_outputs(results: Sequence[AlgorithmResult], out_dir: str | Path) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "results.jsonl").write_text(results_jsonl(results))
    (out / "timings.jsonl").write_text(timings_jsonl(results))
    rows = summarize(results)
    (out / "summary.csv").write_text(summary_csv(rows))
    (out / "summary.md").write_text(summary_markdown(rows))
    return out


def master_seed_from_env(default: int) -> int:
    v = os.environ.get(SEED_ENV)
    return default if v in (None, "") else int(v)
