"""SVG rendering backend for the explanation plots.

Thin matplotlib layer: every function draws one PlotSpec kind from its
data series.  Output is kept deterministic (fixed hash salt, no date
metadata) so repeated runs produce identical files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, plot, path):
    plt.rcParams["svg.hashsalt"] = plot.name
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _radar(plot, path):
    axes_labels = plot.data["axes"]
    values = list(plot.data["values"])
    angles = np.linspace(0, 2 * np.pi, len(axes_labels), endpoint=False).tolist()
    angles.append(angles[0])
    values.append(values[0])

    fig = plt.figure(figsize=(5, 5))
    ax = fig.add_subplot(111, polar=True)
    ax.plot(angles, values, color="tab:blue")
    ax.fill(angles, values, color="tab:blue", alpha=0.25)
    ax.set_xticks(angles[:-1])
    ax.set_xticklabels(axes_labels, fontsize=8)
    ax.set_ylim(0, 1)
    ax.set_title(plot.title)
    _save(fig, plot, path)


def _silhouette(plot, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    y = 0
    for c, values in enumerate(plot.data["clusters"]):
        xs = np.arange(y, y + len(values))
        ax.bar(xs, values, width=1.0, label=f"cluster {c}")
        y += len(values) + 3
    ax.axhline(plot.data["mean"], color="red", linestyle="--",
               label=f"mean {plot.data['mean']:.3f}")
    ax.set_xlabel("samples grouped by cluster")
    ax.set_ylabel("silhouette value")
    ax.set_title(plot.title)
    ax.legend(fontsize=8)
    _save(fig, plot, path)


def _heatmap(plot, path):
    matrix = np.asarray(plot.data["matrix"])
    labels = plot.data["labels"]
    fig, ax = plt.subplots(figsize=(6, 5))
    image = ax.imshow(matrix, cmap="viridis")
    ax.set_xticks(range(len(labels)))
    ax.set_yticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
    ax.set_yticklabels(labels, fontsize=8)
    fig.colorbar(image, ax=ax)
    ax.set_title(plot.title)
    fig.tight_layout()
    _save(fig, plot, path)


def _bar(plot, path):
    labels = plot.data["labels"]
    values = plot.data["values"]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(range(len(values)), values, color="tab:blue")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("value")
    ax.set_title(plot.title)
    fig.tight_layout()
    _save(fig, plot, path)


def _learning_curve(plot, path):
    sizes = plot.data["sizes"]
    t_mean = np.asarray(plot.data["train_mean"])
    t_std = np.asarray(plot.data["train_std"])
    v_mean = np.asarray(plot.data["val_mean"])
    v_std = np.asarray(plot.data["val_std"])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(sizes, t_mean, "o-", color="tab:blue", label="training score")
    ax.fill_between(sizes, t_mean - t_std, t_mean + t_std,
                    color="tab:blue", alpha=0.15)
    ax.plot(sizes, v_mean, "o-", color="tab:orange", label="validation score")
    ax.fill_between(sizes, v_mean - v_std, v_mean + v_std,
                    color="tab:orange", alpha=0.15)
    ax.set_xlabel("training-set size")
    ax.set_ylabel(plot.data["score_name"])
    ax.set_title(plot.title)
    ax.grid(True, linestyle="--", alpha=0.5)
    ax.legend(loc="best")
    _save(fig, plot, path)


def _performance(plot, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(plot.data["fit_times"], plot.data["val_mean"], "o-",
            color="tab:green")
    ax.set_xlabel("fit time (s)")
    ax.set_ylabel(plot.data["score_name"])
    ax.set_title(plot.title)
    ax.grid(True, linestyle="--", alpha=0.5)
    _save(fig, plot, path)


def _scalability(plot, path):
    sizes = plot.data["sizes"]
    times = np.asarray(plot.data["fit_times"])
    std = np.asarray(plot.data["fit_std"])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(sizes, times, "o-", color="tab:red")
    ax.fill_between(sizes, times - std, times + std, color="tab:red", alpha=0.15)
    ax.set_xlabel("training-set size")
    ax.set_ylabel("fit time (s)")
    ax.set_title(plot.title)
    ax.grid(True, linestyle="--", alpha=0.5)
    _save(fig, plot, path)


_RENDERERS = {
    "radar": _radar,
    "silhouette": _silhouette,
    "heatmap": _heatmap,
    "bar": _bar,
    "learning_curve": _learning_curve,
    "performance": _performance,
    "scalability": _scalability,
}


def render_plot(plot, path) -> Path:
    path = Path(path)
    try:
        _RENDERERS[plot.kind](plot, path)
    except KeyError:
        raise ValueError(f"no renderer for plot kind {plot.kind!r}") from None
    return path
