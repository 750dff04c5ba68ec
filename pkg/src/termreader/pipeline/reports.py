"""Run reports: metrics JSON, delimited predictions, and figures.

Each command writes into ``<run_dir>/<name>-<config hash>/``:

    metrics.json     deterministic content only (bit-stable across
                     identical runs; wall-clock time goes to timing.txt)
    predictions.tsv  one row per scored item
    history.tsv      per-epoch curve for training runs
    *.png            rendered figures for the same data

The JSON printed to stdout additionally carries the wall-clock seconds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


@dataclass
class MetricsReport:
    kind: str                      # e.g. "selector-eval", "reader-train"
    split: str
    metrics: dict
    config_hash: str
    wall_clock: float
    predictions: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def to_json(self, include_wall_clock=True):
        body = {
            "kind": self.kind,
            "split": self.split,
            "metrics": self.metrics,
            "config_hash": self.config_hash,
            "extra": self.extra,
            "n_predictions": len(self.predictions),
        }
        if include_wall_clock:
            body["wall_clock_sec"] = round(self.wall_clock, 3)
        return json.dumps(body, sort_keys=True, indent=2)


def run_directory(config, name):
    path = Path(config.run_dir) / f"{name}-{config.hash()}"
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_tsv(path, header, rows):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(header) + "\n")
        for row in rows:
            fh.write("\t".join(str(cell) for cell in row) + "\n")


def write_report(report, run_dir, history=None):
    run_dir = Path(run_dir)
    (run_dir / "metrics.json").write_text(
        report.to_json(include_wall_clock=False) + "\n", encoding="utf-8")
    (run_dir / "timing.txt").write_text(
        f"wall_clock_sec={report.wall_clock:.3f}\n", encoding="utf-8")
    if report.predictions:
        header = list(report.predictions[0])
        _write_tsv(run_dir / "predictions.tsv", header,
                   [[p[h] for h in header] for p in report.predictions])
    if history:
        header = list(history[0])
        _write_tsv(run_dir / "history.tsv", header,
                   [[row[h] for h in header] for row in history])
        plot_history(history, run_dir / "training_curve.png")
    plot_metrics(report, run_dir / "metrics.png")
    return run_dir


def plot_history(history, path):
    epochs = [row["epoch"] for row in history]
    fig, ax_loss = plt.subplots(figsize=(7, 4))
    ax_loss.plot(epochs, [row["train_loss"] for row in history],
                 color="tab:blue", label="train loss")
    ax_loss.set_xlabel("epoch")
    ax_loss.set_ylabel("train loss", color="tab:blue")
    dev_keys = [k for k in history[0] if k.startswith("dev_")]
    if dev_keys:
        key = dev_keys[0]
        ax_dev = ax_loss.twinx()
        ax_dev.plot(epochs, [row[key] for row in history],
                    color="tab:orange", label=key)
        ax_dev.set_ylabel(key, color="tab:orange")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_metrics(report, path):
    names = sorted(report.metrics)
    values = [report.metrics[n] for n in names]
    fig, ax = plt.subplots(figsize=(1.5 + 1.2 * len(names), 3.5))
    ax.bar(names, values, color="tab:blue")
    ax.set_ylim(0.0, max(1.0, max(values, default=1.0) * 1.1))
    for i, v in enumerate(values):
        ax.text(i, v, f"{v:.3f}", ha="center", va="bottom", fontsize=9)
    ax.set_title(f"{report.kind} ({report.split})")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_grid(rows, path):
    """Accuracy against retrieval depth, one line per strategy.  ``rows``
    are dicts with strategy, k, and accuracy."""
    strategies = sorted({row["strategy"] for row in rows})
    fig, ax = plt.subplots(figsize=(6, 4))
    for strategy in strategies:
        pts = sorted((row["k"], row["accuracy"])
                     for row in rows if row["strategy"] == strategy)
        ax.plot([p[0] for p in pts], [p[1] for p in pts],
                marker="o", label=strategy)
    ax.set_xlabel("retrieved sentences per choice (k)")
    ax.set_ylabel("accuracy")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_grid(rows, run_dir):
    run_dir = Path(run_dir)
    _write_tsv(run_dir / "grid.tsv", ["strategy", "k", "split", "accuracy"],
               [[r["strategy"], r["k"], r["split"], r["accuracy"]] for r in rows])
    plot_grid(rows, run_dir / "grid.png")
    return run_dir
