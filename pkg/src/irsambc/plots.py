"""Figure rendering from summary CSVs. Plots are derived artifacts only."""
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .errors import InvalidInputError, SchemaError
from .harness import METHOD_ORDER, load_rows

SERIES_LABELS = {
    "drl": "learned, no CSI",
    "zf": "ZF, no IRS",
    "eig": "EIG, no IRS",
    "zf-irs": "ZF + IRS",
    "eig-irs": "EIG + IRS",
}
SERIES_MARKERS = {"drl": "o", "zf": "s", "eig": "d", "zf-irs": "^", "eig-irs": "v"}
AXIS_LABELS = {
    "n": "IRS reflectors N",
    "l_t": "training symbol length L_t",
    "t_1": "random-phase steps T_1",
}


def _series(rows, field, value_column):
    methods = [m for m in METHOD_ORDER if any(r["method"] == m for r in rows)]
    if not methods:
        raise InvalidInputError("summary contains no methods to plot")
    out = {}
    for method in methods:
        points = sorted((float(r[field]), float(r[value_column]))
                        for r in rows if r["method"] == method)
        out[method] = ([p[0] for p in points], [p[1] for p in points])
    return out


def _render(rows, field, value_column, ylabel, path, log_y=False):
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    for method, (xs, ys) in _series(rows, field, value_column).items():
        ax.plot(xs, ys, marker=SERIES_MARKERS[method], label=SERIES_LABELS[method])
    if log_y:
        ax.set_yscale("log")
    ax.set_xlabel(AXIS_LABELS.get(field, field))
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.4)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def emit_plots(summary_path, out_dir=None):
    """GRCD (linear) and BER (log) figures, one series per method.

    The sweep variable is taken from the summary's first column. Returns the
    written file paths.
    """
    rows = load_rows(summary_path)
    if not rows:
        raise InvalidInputError(f"no rows to plot in {summary_path}")
    field = next(iter(rows[0]))
    for column in (field, "method", "median_grcd", "median_ber"):
        if column not in rows[0]:
            raise SchemaError(f"summary file missing column '{column}'")
    out = out_dir or os.path.dirname(os.path.abspath(summary_path))
    os.makedirs(out, exist_ok=True)
    return [
        _render(rows, field, "median_grcd", "median GRCD",
                os.path.join(out, f"grcd_vs_{field}.png")),
        _render(rows, field, "median_ber", "median BER",
                os.path.join(out, f"ber_vs_{field}.png"), log_y=True),
    ]
