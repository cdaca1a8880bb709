"""Sequential model-based hyperparameter search (TPE) over the tuning spaces."""

from __future__ import annotations

import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import registry
from .param_opt import BudgetLedger
from .problems import ProblemKind, ProblemSpec, brute_force_solve, generate, qubo_to_ising
from .rngcore import RngStream, as_stream

log = logging.getLogger(__name__)

GAMMA = 0.25
N_CANDIDATES = 64
TUNING_SEED = 10_000


@dataclass(frozen=True)
class ParamDomain:
    """One search dimension: ``continuous``/``integer`` over [lo, hi] or ``categorical`` over options."""

    name: str
    kind: str
    lo: float = 0.0
    hi: float = 0.0
    options: tuple = ()

    def __post_init__(self):
        if self.kind not in ("continuous", "integer", "categorical"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.kind == "categorical":
            object.__setattr__(self, "options", tuple(self.options))
            if not self.options:
                raise ValueError(f"{self.name}: categorical domain needs options")
        elif not self.lo < self.hi:
            raise ValueError(f"{self.name}: need lo < hi, got [{self.lo}, {self.hi}]")

    @classmethod
    def continuous(cls, name, lo, hi):
        return cls(name, "continuous", float(lo), float(hi))

    @classmethod
    def integer(cls, name, lo, hi):
        return cls(name, "integer", int(lo), int(hi))

    @classmethod
    def categorical(cls, name, options):
        return cls(name, "categorical", options=tuple(options))

    @property
    def width(self) -> float:
        return float(self.hi - self.lo)

    def contains(self, v) -> bool:
        if self.kind == "categorical":
            return v in self.options
        if self.kind == "integer" and int(v) != v:
            return False
        return self.lo <= v <= self.hi

    def clamp(self, v: float):
        v = min(max(v, self.lo), self.hi)
        return int(round(v)) if self.kind == "integer" else float(v)

    def sample(self, rng: RngStream):
        if self.kind == "categorical":
            return self.options[int(rng.integers(len(self.options)))]
        if self.kind == "integer":
            return int(rng.integers(self.lo, self.hi + 1))
        return float(rng.uniform(self.lo, self.hi))


@dataclass
class TrialRecord:
    config: dict[str, Any]
    loss: float
    wall_time: float
    eval_count: int = 0
    error: str | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["loss"] = self.loss if math.isfinite(self.loss) else None
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TrialRecord":
        d = dict(d)
        d["loss"] = math.inf if d.get("loss") is None else float(d["loss"])
        return cls(**d)


@dataclass
class SearchResult:
    best_config: dict[str, Any]
    trials: list[TrialRecord] = field(default_factory=list)

    @property
    def best_loss(self) -> float:
        return min(t.loss for t in self.trials)


# -- densities ---------------------------------------------------------------


class _Parzen:
    """Per-dimension kernel density over one group of trials."""

    def __init__(self, dom: ParamDomain, values: Sequence):
        self.dom = dom
        self.values = list(values)
        if dom.kind == "categorical":
            counts = np.ones(len(dom.options))
            for v in self.values:
                counts[dom.options.index(v)] += 1
            self.probs = counts / counts.sum()
        else:
            self.points = np.asarray(self.values, dtype=float)
            self.bw = dom.width / math.sqrt(max(len(self.points), 1))

    def sample(self, rng: RngStream):
        if self.dom.kind == "categorical":
            return self.dom.options[int(rng.choice(len(self.probs), p=self.probs))]
        if not len(self.points):
            return self.dom.sample(rng)
        centre = self.points[int(rng.integers(len(self.points)))]
        return self.dom.clamp(rng.normal(centre, self.bw))

    def log_pdf(self, v) -> float:
        if self.dom.kind == "categorical":
            return math.log(self.probs[self.dom.options.index(v)])
        if not len(self.points):
            return -math.log(self.dom.width)
        z = (float(v) - self.points) / self.bw
        dens = np.exp(-0.5 * z * z).mean() / (self.bw * math.sqrt(2 * math.pi))
        return math.log(max(dens, 1e-300))


def _propose_tpe(space: Sequence[ParamDomain], trials: Sequence[TrialRecord], rng: RngStream) -> dict:
    ranked = sorted(trials, key=lambda t: t.loss)
    n_good = max(1, math.ceil(GAMMA * len(ranked)))
    good, bad = ranked[:n_good], ranked[n_good:]
    l_est = {d.name: _Parzen(d, [t.config[d.name] for t in good]) for d in space}
    g_est = {d.name: _Parzen(d, [t.config[d.name] for t in bad]) for d in space}
    best, best_score = None, -math.inf
    for _ in range(N_CANDIDATES):
        cand = {d.name: l_est[d.name].sample(rng) for d in space}
        score = sum(l_est[k].log_pdf(v) - g_est[k].log_pdf(v) for k, v in cand.items())
        if score > best_score:
            best, best_score = cand, score
    return best


def _as_loss(out) -> tuple[float, int]:
    """Objectives may return a loss or ``(loss, eval_count)``."""
    if isinstance(out, tuple):
        return float(out[0]), int(out[1])
    return float(out), 0


def pick_best(trials: Sequence[TrialRecord]) -> TrialRecord:
    """Lowest loss; exact ties go to the cheaper trial, then the earlier one."""
    return min(trials, key=lambda t: (t.loss, t.eval_count))


def search(
    space: Sequence[ParamDomain],
    objective: Callable[[dict], Any],
    n_trials: int,
    time_limit: float | None = None,
    seed: int = 0,
    method: str = "tpe",
    log_path: str | Path | None = None,
) -> SearchResult:
    """Minimise ``objective`` over ``space``.

    The first ``max(5, n_trials // 5)`` trials are uniform random, later ones
    come from the TPE proposal (``method="random"`` keeps sampling uniformly).
    A trial whose objective raises is recorded with loss ``inf``. The search
    stops early once ``time_limit`` seconds have elapsed.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    if method not in ("tpe", "random"):
        raise ValueError(f"unknown method {method!r}")
    rng = as_stream(seed, "hypertune")
    n_startup = max(5, n_trials // 5)
    trials: list[TrialRecord] = []
    started = time.perf_counter()
    log_file = open(log_path, "w") if log_path else None
    try:
        for i in range(n_trials):
            if time_limit is not None and trials and time.perf_counter() - started >= time_limit:
                log.info("time limit reached after %d trials", len(trials))
                break
            if method == "random" or i < n_startup:
                config = {d.name: d.sample(rng) for d in space}
            else:
                config = _propose_tpe(space, trials, rng)
            t0 = time.perf_counter()
            err = None
            try:
                loss, evals = _as_loss(objective(dict(config)))
                if math.isnan(loss):
                    loss = math.inf
            except Exception as exc:  # recorded, search continues
                log.warning("trial %d failed: %s", i, exc)
                loss, evals, err = math.inf, 0, f"{type(exc).__name__}: {exc}"
            rec = TrialRecord(config, loss, time.perf_counter() - t0, evals, err)
            trials.append(rec)
            log.debug("trial %d loss=%.6g config=%s", i, loss, config)
            if log_file:
                log_file.write(json.dumps(rec.to_dict(), sort_keys=True) + "\n")
                log_file.flush()
    finally:
        if log_file:
            log_file.close()
    return SearchResult(dict(pick_best(trials).config), trials)


def load_trials(path: str | Path) -> list[TrialRecord]:
    with open(path) as fh:
        return [TrialRecord.from_dict(json.loads(line)) for line in fh if line.strip()]


def save_best(path: str | Path, algorithm: str, n: int, config: dict) -> None:
    Path(path).write_text(json.dumps({"algorithm": algorithm, "n": n, "params": config}, indent=2, sort_keys=True) + "\n")


def load_best(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())


# -- tuning spaces and objectives -------------------------------------------


def space_for(algorithm: str) -> list[ParamDomain]:
    C, I, K = ParamDomain.continuous, ParamDomain.integer, ParamDomain.categorical
    if algorithm == "evqe":
        return [
            I("population_size", 5, 20),
            I("dist_threshold", 1, 10),
            C("prob_insertion", 0, 1),
            C("prob_removal", 0, 1),
            C("a", 0, 0.5),
            C("b", 0, 0.5),
        ]
    if algorithm == "vans":
        return [
            K("initial_layer", ("SA", "HEA")),
            C("scale", 0, 1.5),
            C("temperature", 1, 20),
            C("accept_wall", 30, 70),
            C("accept_perc", 0, 1),
            C("min_randomness", 30, 50),
            C("max_randomness", 50, 70),
            I("decrease_to", 1, 10),
            C("factor_accept_perc", 0.8, 0.99),
        ]
    if algorithm == "ravqe":
        return [K("initial_layer", ("SA", "HEA"))]
    if algorithm == "qaoa":
        return [I("p", 1, 10)]
    raise ValueError(f"unknown algorithm {algorithm!r}")


def tuning_objective(algorithm: str, n: int, seed: int = TUNING_SEED, budget: int = 10_000) -> Callable[[dict], tuple]:
    """Run ``algorithm`` once on the MaxCut ER tuning instance and report its own loss."""
    spec = registry.get(algorithm)
    model = qubo_to_ising(generate(ProblemSpec(ProblemKind.MAXCUT_ER, n, seed)))
    truth = brute_force_solve(model)

    def objective(config: dict) -> tuple[float, int]:
        res = spec.run(model, config, seed, BudgetLedger(global_cap=budget), truth=truth)
        return res.loss, res.evals_used

    return objective


def tune(
    algorithm: str,
    n: int,
    n_trials: int = 50,
    time_limit: float | None = None,
    seed: int = 0,
    method: str = "tpe",
    log_path=None,
    budget: int = 10_000,
) -> SearchResult:
    return search(
        space_for(algorithm),
        tuning_objective(algorithm, n, budget=budget),
        n_trials,
        time_limit=time_limit,
        seed=seed,
        method=method,
        log_path=log_path,
    )
