"""Delimited reports and figures for the command line."""

from __future__ import annotations

import csv
import os
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["write_tsv", "plot_outcomes", "plot_corpus"]

# fixed metadata keeps the PNG bytes identical across runs
_PNG_META = {"Software": None}


def write_tsv(path: str, header: Sequence[str], rows: Sequence[Sequence]) -> str:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def plot_outcomes(path: str, values: Mapping[str, float], title: str, ylabel: str = "probability") -> str:
    """Bar chart of an outcome distribution or a shot histogram."""
    keys = sorted(values)
    fig, ax = plt.subplots(figsize=(max(3.0, 0.8 * len(keys) + 1.5), 3.0))
    ax.bar(range(len(keys)), [float(values[k]) for k in keys], color="#4c72b0")
    ax.set_xticks(range(len(keys)), keys)
    ax.set_ylabel(ylabel)
    ax.set_title(title, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata=_PNG_META)
    plt.close(fig)
    return path


def plot_corpus(directory: str, results: Sequence, timings: bool = False) -> list[str]:
    """Instance counts per criterion, and wall times when ``timings`` is set."""
    labels = [f"{r.number}" for r in results]
    colors = ["#55a868" if r.passed else "#c44e52" for r in results]
    figures = [("corpus_checked.png", [r.checked for r in results], "instances checked")]
    if timings:
        figures.append(("corpus_seconds.png", [r.seconds for r in results], "seconds"))
    out = []
    for name, values, ylabel in figures:
        fig, ax = plt.subplots(figsize=(6.0, 3.0))
        ax.bar(labels, values, color=colors)
        ax.set_xlabel("criterion")
        ax.set_ylabel(ylabel)
        if name == "corpus_checked.png":
            ax.set_yscale("log")
        fig.tight_layout()
        path = os.path.join(directory, name)
        fig.savefig(path, dpi=100, metadata=_PNG_META)
        plt.close(fig)
        out.append(path)
    return out
