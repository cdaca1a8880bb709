"""
Benchmark matrix, tables and plots
==================================

Run a small seeded matrix, write the result files, and draw a bar chart of
the approximation ratios. Rerunning with the same master seed reproduces
``results.jsonl`` byte for byte.
"""

import tempfile
from pathlib import Path

from vqabench.bench import ExperimentConfig, run_matrix, summarize, summary_markdown
from vqabench.report_plots import PlotSpec, render

out = Path(tempfile.mkdtemp()) / "bench"
cfg = ExperimentConfig(
    kinds=["MaxCutStar", "MaxCutER"],
    sizes=[4],
    instances=2,
    global_cap=1000,
    out_dir=str(out),
)
results = run_matrix(cfg)
print(summary_markdown(summarize(results)))

# %%
svg = render(PlotSpec("ratio", out / "summary.csv", out / "ratio.svg"))
print("wrote", svg, "and", sorted(p.name for p in out.iterdir()))
