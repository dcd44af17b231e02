"""Figure rendering for experiment reports.

Every experiment's report path renders one or two matplotlib figures next
to the delimited output.  All figures use the Agg backend and fixed
metadata so reruns of the same config produce identical bytes.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_SAVE_KW = {"dpi": 120, "metadata": {"Software": "sbmlab"}}


def _finish(fig, path: Path):
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return path


def loglog_curve(path, x, ys, labels, xlabel, ylabel, title):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    for y, lab in zip(ys, labels):
        ax.loglog(x, y, marker="o", ms=3, label=lab)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    return _finish(fig, Path(path))


def semilog_curve(path, x, ys, labels, xlabel, ylabel, title, logx=True):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    plot = ax.semilogx if logx else ax.plot
    for y, lab in zip(ys, labels):
        plot(x, y, marker="o", ms=3, label=lab)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    return _finish(fig, Path(path))


def histogram(path, values, xlabel, title, bins=60, log=False):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.hist(np.asarray(values), bins=bins, log=log, color="steelblue",
            edgecolor="none")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("count")
    ax.set_title(title)
    return _finish(fig, Path(path))


def errorbar_points(path, x, y, yerr, xlabel, ylabel, title, hline=None):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.errorbar(x, y, yerr=yerr, fmt="o", capsize=3)
    if hline is not None:
        ax.axhline(hline, color="crimson", lw=1, ls="--")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    return _finish(fig, Path(path))
