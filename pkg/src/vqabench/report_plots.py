"""Grouped bar charts (SVG) from a bench summary file."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .bench import ALGORITHM_LABELS, read_summary_csv  # noqa: E402
from .registry import ALGORITHMS  # noqa: E402

# metric -> (mean column, std column or None, axis label)
METRICS = {
    "ratio": ("ratio_mean", "ratio_std", "approximation ratio"),
    "gates": ("gates", None, "gates"),
    "cnot": ("cnot", None, "CNOT gates"),
    "evals": ("evals_mean", None, "evaluations"),
}


@dataclass(frozen=True)
class PlotSpec:
    metric: str
    summary_path: str | Path
    out_path: str | Path
    kind: str | None = None


def _groups(rows, kind):
    kinds = sorted({r["kind"] for r in rows})
    if kind is not None:
        rows = [r for r in rows if r["kind"] == kind]
        if not rows:
            raise ValueError(f"no rows for problem kind {kind!r}; have {kinds}")
    multi = len({r["kind"] for r in rows}) > 1
    keys = sorted({(r["kind"], int(r["n"])) for r in rows})
    labels = [f"{k} N={n}" if multi else f"N={n}" for k, n in keys]
    return rows, keys, labels


def render(spec: PlotSpec) -> Path:
    """Bars grouped by size, one bar per algorithm, std error bars where the summary has them."""
    if spec.metric not in METRICS:
        raise ValueError(f"unknown metric {spec.metric!r}; choose from {sorted(METRICS)}")
    col, std_col, ylabel = METRICS[spec.metric]
    path = Path(spec.summary_path)
    if not path.exists():
        raise FileNotFoundError(f"summary file {path} not found")
    rows = read_summary_csv(path)
    if not rows:
        raise ValueError(f"summary file {path} has no rows")
    if col not in rows[0]:
        raise ValueError(f"metric column {col!r} missing from {path}")
    rows, keys, labels = _groups(rows, spec.kind)
    algs = sorted({r["algorithm"] for r in rows}, key=lambda a: (ALGORITHMS.index(a) if a in ALGORITHMS else 99, a))
    lookup = {(r["kind"], int(r["n"]), r["algorithm"]): r for r in rows}

    with plt.rc_context({"svg.hashsalt": "vqabench", "svg.fonttype": "path", "svg.id": "vqabench"}):
        fig, ax = plt.subplots(figsize=(1.6 + 1.2 * len(keys) * max(1, len(algs)) / 2, 3.6))
        width = 0.8 / len(algs)
        x = np.arange(len(keys))
        for i, alg in enumerate(algs):
            vals, errs = [], []
            for k in keys:
                r = lookup.get((*k, alg))
                v = r[col] if r else None
                vals.append(np.nan if v is None else v)
                e = r.get(std_col) if (r and std_col) else None
                errs.append(0.0 if e is None or np.isnan(e) else e)
            has_err = std_col is not None and any(e > 0 for e in errs)
            ax.bar(
                x + (i - (len(algs) - 1) / 2) * width,
                vals,
                width,
                yerr=errs if has_err else None,
                capsize=3 if has_err else 0,
                label=ALGORITHM_LABELS.get(alg, alg),
            )
        ax.set_xticks(x, labels)
        ax.set_ylabel(ylabel)
        if spec.metric == "ratio":
            ax.axhline(1.0, color="0.5", lw=0.8, ls="--")
        ax.legend(fontsize="small", ncols=min(len(algs), 4))
        fig.tight_layout()
        out = Path(spec.out_path)
        out.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out, format="svg", metadata={"Date": None})
        plt.close(fig)
    return out
