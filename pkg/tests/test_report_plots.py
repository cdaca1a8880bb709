import pytest
from matplotlib.container import BarContainer, ErrorbarContainer

from vqabench import report_plots

from vqabench import bench
from vqabench.report_plots import PlotSpec, render
from vqabench.results import AlgorithmResult


def write_summary(path, cells):
    rs = [
        AlgorithmResult(alg, bench.instance_id("MaxCutER", n, i), r, -r, -r, -1.0, 5, 1, 3, 10, 0.1, None,
                        dict(kind="MaxCutER", n=n, instance=i))
        for alg, n, ratios in cells
        for i, r in enumerate(ratios)
    ]
    path.write_text(bench.summary_csv(bench.summarize(rs)))
    return path


def count_bars(path):
    """Render ``path`` while capturing the axes; returns (bar count, axes)."""

    captured = {}
    orig = report_plots.plt.subplots

    def spy(*a, **kw):
        fig, ax = orig(*a, **kw)
        captured["ax"] = ax
        return fig, ax

    report_plots.plt.subplots = spy
    try:
        render(PlotSpec("ratio", path, path.with_suffix(".svg")))
    finally:
        report_plots.plt.subplots = orig
    ax = captured["ax"]
    return sum(len(c.patches) for c in ax.containers if isinstance(c, BarContainer)), ax


def test_single_row_single_bar_no_error_bar(tmp_path):
    p = write_summary(tmp_path / "s.csv", [("qaoa", 4, [0.9])])
    n, ax = count_bars(p)
    assert n == 1
    assert not any(isinstance(c, ErrorbarContainer) for c in ax.containers)


def test_four_by_four_sixteen_bars(tmp_path):
    cells = [(a, n, [0.8, 0.9]) for a in ("evqe", "vans", "ravqe", "qaoa") for n in (4, 8, 12, 15)]
    n, ax = count_bars(write_summary(tmp_path / "s.csv", cells))
    assert n == 16
    assert sum(isinstance(c, ErrorbarContainer) for c in ax.containers) == 4


def test_unknown_metric(tmp_path):
    p = write_summary(tmp_path / "s.csv", [("qaoa", 4, [0.9])])
    with pytest.raises(ValueError, match="unknown metric"):
        render(PlotSpec("fidelity", p, tmp_path / "x.svg"))


def test_missing_column(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("kind,n,algorithm\nMaxCutER,4,qaoa\n")
    with pytest.raises(ValueError, match="ratio_mean"):
        render(PlotSpec("ratio", p, tmp_path / "x.svg"))


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        render(PlotSpec("ratio", tmp_path / "nope.csv", tmp_path / "x.svg"))


@pytest.mark.parametrize("metric", ["ratio", "gates", "cnot", "evals"])
def test_render_deterministic(tmp_path, metric):
    p = write_summary(tmp_path / "s.csv", [("qaoa", 4, [0.9, 0.7]), ("vans", 4, [1.0]), ("vans", 8, [0.95, 0.9])])
    a = render(PlotSpec(metric, p, tmp_path / "a.svg")).read_bytes()
    b = render(PlotSpec(metric, p, tmp_path / "b.svg")).read_bytes()
    assert a == b and len(a) > 1000
