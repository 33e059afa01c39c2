import logging
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .records import read_summary, read_trials  # noqa: E402

_logger = logging.getLogger(__name__)

SVG_RC = {
    "svg.hashsalt": "otdro",
    "svg.fonttype": "path",
    "figure.figsize": (6.4, 4.0),
}
SVG_METADATA = {"Date": None}


def _save(fig, path):
    fig.savefig(path, format="svg", metadata=SVG_METADATA)
    plt.close(fig)
    _logger.info("Wrote {}".format(path))
    return path


def _histogram(trials, summary, path):
    deviation = trials["deviation"].to_numpy(dtype=float)
    fig, ax = plt.subplots()
    bins = int(np.clip(np.sqrt(len(deviation)), 10, 50))
    ax.hist(deviation, bins=bins, color="0.6", edgecolor="0.2")
    envelope = float(summary["envelope"].iloc[0])
    erm = bool((summary["side"] == "upper").all())
    level = 2.0 * envelope if erm else envelope
    ax.axvline(level, color="tab:red", linestyle="--", label="envelope")
    if not erm:
        ax.axvline(-level, color="tab:red", linestyle="--")
    ax.set_xlabel("excess risk" if erm else "deviation from reference value")
    ax.set_ylabel("trials")
    ax.legend()
    return _save(fig, path)


def _exceedance(summary, path):
    fig, ax = plt.subplots()
    for side, frame in summary.groupby("side", sort=True):
        frame = frame.sort_values("eps", kind="mergesort")
        eps = frame["eps"].to_numpy(dtype=float)
        ax.plot(eps, frame["frequency"].to_numpy(dtype=float), marker="o", label=side)
    tails = summary.drop_duplicates("eps").sort_values("eps", kind="mergesort")
    eps = tails["eps"].to_numpy(dtype=float)
    tail = tails["tail"].to_numpy(dtype=float)
    stderr = tails["stderr"].to_numpy(dtype=float)
    ax.plot(eps, tail, color="k", label="tail bound")
    ax.fill_between(eps, tail, np.minimum(tail + 3.0 * stderr, 1.0), color="0.85")
    ax.set_xlabel("eps")
    ax.set_ylabel("exceedance frequency")
    ax.set_ylim(bottom=0.0)
    ax.legend()
    return _save(fig, path)


def emit_plots(trials_csv: pathlib.Path, summary_csv: pathlib.Path = None):
    """
    Deviation histogram and exceedance-vs-eps curve of a run, written next
    to `trials_csv`. The summary defaults to the run's summary.csv. Both
    files are read before anything is written.

    Returns
    -------
    list(pathlib.Path)
        The two SVG files
    """
    trials_csv = pathlib.Path(trials_csv)
    if summary_csv is None:
        summary_csv = trials_csv.parent / "summary.csv"
    trials = read_trials(trials_csv)
    summary = read_summary(summary_csv)

    out_dir = trials_csv.parent
    with plt.rc_context(SVG_RC):
        return [
            _histogram(trials, summary, out_dir / "deviation_histogram.svg"),
            _exceedance(summary, out_dir / "exceedance.svg"),
        ]
