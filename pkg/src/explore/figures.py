"""Static PNG renderings of evaluation reports and training runs."""

import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

log = logging.getLogger(__name__)

DPI = 120


def plot_metric_summary(report, path) -> Path:
    """Single-axis bar chart of the headline report metrics."""
    labels = [f"map@{report.k}", f"ndcg@{report.k}", "coverage"]
    values = [report.map_at_k, report.mean_ndcg_at_k, report.coverage]
    fig, ax = plt.subplots(figsize=(5, 3.2))
    bars = ax.bar(labels, values, color=["#4878a8", "#6aa84f", "#b45f06"])
    ax.bar_label(bars, fmt="%.3f", padding=2)
    ax.set_ylim(0, 1.05)
    ax.set_title(f"{report.algo} on {report.strategy} split (rmse {report.rmse:.3f})")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return path


def plot_per_user(report, path) -> Path:
    """Per-user AP and NDCG bars, users in index order."""
    rows = report.per_user
    fig, ax = plt.subplots(figsize=(max(5, 0.45 * len(rows) + 2), 3.2))
    if rows:
        xs = range(len(rows))
        width = 0.4
        ax.bar([x - width / 2 for x in xs], [r["ap"] for r in rows],
               width=width, label=f"ap@{report.k}", color="#4878a8")
        ax.bar([x + width / 2 for x in xs], [r["ndcg"] for r in rows],
               width=width, label=f"ndcg@{report.k}", color="#6aa84f")
        ax.set_xticks(list(xs))
        ax.set_xticklabels([r["user"] for r in rows], rotation=45, ha="right")
        ax.legend()
    else:
        ax.text(0.5, 0.5, "no ranked users", ha="center", va="center")
    ax.set_ylim(0, 1.05)
    ax.set_title("per-user ranking quality")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return path


def plot_training_curve(training_log, path) -> Path:
    """Epoch RMSE trajectory of a factorization run."""
    fig, ax = plt.subplots(figsize=(5, 3.2))
    epochs = range(1, len(training_log) + 1)
    ax.plot(list(epochs), list(training_log), marker="o", markersize=3,
            color="#4878a8")
    ax.set_xlabel("epoch")
    ax.set_ylabel("train rmse")
    ax.set_title("training curve")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return path


def render_report_figures(report, out_dir, training_log=None) -> list:
    """Write the standard figure set next to a report; returns written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = [
        plot_metric_summary(report, out_dir / "metric_summary.png"),
        plot_per_user(report, out_dir / "per_user.png"),
    ]
    if training_log:
        paths.append(plot_training_curve(training_log, out_dir / "training_curve.png"))
    for p in paths:
        log.info("wrote figure %s", p)
    return paths
