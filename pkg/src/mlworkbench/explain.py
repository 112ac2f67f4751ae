"""Explanation bundles: the plots, tables and LaTeX text behind each result.

Every engine result is documented by a bundle whose plot data series are
first-class (testable without rendering); SVG files are produced by the
swappable renderer in render.py.  Each plot and table gets a companion
LaTeX snippet ready to paste into a document.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class ExplainError(ValueError):
    pass


@dataclass
class PlotSpec:
    name: str
    kind: str          # radar | silhouette | heatmap | bar | learning_curve |
                       # performance | scalability
    title: str
    data: dict         # plain JSON-serialisable series

    @property
    def filename(self) -> str:
        return f"{self.name}.svg"


@dataclass
class TableSpec:
    name: str
    headers: list
    rows: list


@dataclass
class LatexSnippet:
    name: str
    source: str


@dataclass
class ExplainBundle:
    request_id: str
    plots: list = field(default_factory=list)
    tables: list = field(default_factory=list)
    latex_snippets: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def snippet_names(self) -> set:
        return {s.name for s in self.latex_snippets}

    def is_complete(self) -> bool:
        """Every plot and table must have a LaTeX snippet of the same name."""
        names = self.snippet_names()
        members = [p.name for p in self.plots] + [t.name for t in self.tables]
        return all(m in names for m in members)


# --- LaTeX helpers -----------------------------------------------------------

_SPECIALS = {"&": r"\&", "%": r"\%", "$": r"\$", "#": r"\#",
             "_": r"\_", "{": r"\{", "}": r"\}", "~": r"\textasciitilde{}",
             "^": r"\textasciicircum{}"}


def latex_escape(text: str) -> str:
    return "".join(_SPECIALS.get(c, c) for c in str(text))


def latex_well_formed(source: str) -> bool:
    """Balanced braces and properly nested \\begin/\\end environments."""
    depth = 0
    i = 0
    while i < len(source):
        c = source[i]
        if c == "\\" and i + 1 < len(source) and source[i + 1] in "{}":
            i += 2
            continue
        if c == "{":
            depth += 1
        elif c == "}":
            depth -= 1
            if depth < 0:
                return False
        i += 1
    if depth != 0:
        return False

    stack = []
    for kind, env in re.findall(r"\\(begin|end)\{([^}]*)\}", source):
        if kind == "begin":
            stack.append(env)
        else:
            if not stack or stack.pop() != env:
                return False
    return not stack


def _label(request_id: str, name: str) -> str:
    return f"{request_id}_{name}".strip("_").replace("_", "-")


def figure_snippet(request_id: str, name: str, caption: str) -> LatexSnippet:
    source = "\n".join([
        r"\begin{figure}[htb]",
        r"\centering",
        rf"\includegraphics[width=0.8\linewidth]{{plots/{name}}}",
        rf"\caption{{{caption}}}",
        rf"\label{{fig:{_label(request_id, name)}}}",
        r"\end{figure}",
    ])
    return LatexSnippet(name=name, source=source)


def table_snippet(request_id: str, name: str, caption: str,
                  headers, rows) -> LatexSnippet:
    spec = "l" * len(headers)
    lines = [r"\begin{table}[htb]", r"\centering",
             rf"\begin{{tabular}}{{{spec}}}", r"\hline"]
    lines.append(" & ".join(latex_escape(h) for h in headers) + r" \\")
    lines.append(r"\hline")
    for row in rows:
        lines.append(" & ".join(latex_escape(c) for c in row) + r" \\")
    lines += [r"\hline", r"\end{tabular}",
              rf"\caption{{{caption}}}",
              rf"\label{{tab:{_label(request_id, name)}}}",
              r"\end{table}"]
    return LatexSnippet(name=name, source="\n".join(lines))


def _round(x, nd=4):
    return float(np.round(float(x), nd))


# --- generators ----------------------------------------------------------------

def explain_clustering(result, feature_names, request_id: str = "") -> ExplainBundle:
    """Radar chart per cluster, silhouette plot, cluster table, LaTeX text.

    Radar axes are the features with centroid coordinates scaled into
    [0, 1] by the dataset's per-feature min/max; the silhouette plot is
    omitted (with a note) when there is a single cluster.
    """
    d = result.centroids.shape[1]
    if not feature_names or len(feature_names) != d:
        raise ExplainError(
            f"feature_names must have {d} entries, got {len(feature_names or [])}")

    bundle = ExplainBundle(request_id=request_id)
    spans = result.feature_maxs - result.feature_mins
    sizes = result.cluster_sizes()

    for c in range(result.k):
        scaled = np.where(
            spans > 0,
            (result.centroids[c] - result.feature_mins) / np.where(spans > 0, spans, 1.0),
            0.5)
        name = f"cluster_{c}_radar"
        bundle.plots.append(PlotSpec(
            name=name, kind="radar",
            title=f"Profile of cluster {c}",
            data={"axes": list(feature_names),
                  "values": [_round(v) for v in scaled],
                  "cluster": c, "size": sizes[c]}))
        bundle.latex_snippets.append(figure_snippet(
            request_id, name,
            f"Profile of cluster {c} ({sizes[c]} rows): centroid position "
            "scaled to the observed range of each feature."))

    if result.silhouette_per_sample is not None:
        series = []
        for c in range(result.k):
            values = result.silhouette_per_sample[result.assignments == c]
            series.append(sorted((_round(v) for v in values), reverse=True))
        bundle.plots.append(PlotSpec(
            name="silhouette", kind="silhouette",
            title="Silhouette values per cluster",
            data={"clusters": series,
                  "mean": _round(result.silhouette_mean)}))
        bundle.latex_snippets.append(figure_snippet(
            request_id, "silhouette",
            "Per-sample silhouette values grouped by cluster; the dashed "
            f"line marks the mean of {_round(result.silhouette_mean)}."))
    else:
        bundle.notes.append(
            "Silhouette plot omitted: the index is undefined for a single cluster.")

    headers = ["cluster", "size"] + list(feature_names)
    rows = [[c, sizes[c]] + [_round(v) for v in result.centroids[c]]
            for c in range(result.k)]
    bundle.tables.append(TableSpec(name="clusters", headers=headers, rows=rows))
    bundle.latex_snippets.append(table_snippet(
        request_id, "clusters",
        f"The {result.k} cluster centroids with their population sizes.",
        headers, rows))
    return bundle


def explain_pca(result, feature_names, request_id: str = "") -> ExplainBundle:
    """Covariance heatmap of the original features plus a variance bar chart."""
    d = result.covariance.shape[0]
    if not feature_names or len(feature_names) != d:
        raise ExplainError(
            f"feature_names must have {d} entries, got {len(feature_names or [])}")

    bundle = ExplainBundle(request_id=request_id)
    bundle.plots.append(PlotSpec(
        name="covariance_heatmap", kind="heatmap",
        title="Covariance of the original features",
        data={"labels": list(feature_names),
              "matrix": [[_round(v, 6) for v in row]
                         for row in result.covariance]}))
    bundle.latex_snippets.append(figure_snippet(
        request_id, "covariance_heatmap",
        "Covariance between the original features before the reduction."))

    ratios = [_round(v, 6) for v in result.explained_variance_ratio]
    bundle.plots.append(PlotSpec(
        name="explained_variance", kind="bar",
        title="Explained variance ratio per extracted component",
        data={"labels": [f"component {i + 1}" for i in range(len(ratios))],
              "values": ratios}))
    bundle.latex_snippets.append(figure_snippet(
        request_id, "explained_variance",
        f"Share of the total variance captured by each of the {len(ratios)} "
        f"extracted components (sum {_round(sum(ratios))})."))
    return bundle


def explain_supervised(curves, kind: str, request_id: str = "") -> ExplainBundle:
    """Learning, performance and scalability plots from the curve set."""
    if curves is None or len(curves) == 0:
        raise ExplainError("curve set is empty")
    score_name = "accuracy" if kind == "classifier" else "R2 score"
    sizes = [int(s) for s in curves.train_sizes]

    bundle = ExplainBundle(request_id=request_id)
    bundle.plots.append(PlotSpec(
        name="learning_curve", kind="learning_curve",
        title="Learning curve",
        data={"sizes": sizes,
              "train_mean": [_round(v) for v in curves.train_score_mean],
              "train_std": [_round(v) for v in curves.train_score_std],
              "val_mean": [_round(v) for v in curves.val_score_mean],
              "val_std": [_round(v) for v in curves.val_score_std],
              "score_name": score_name}))
    bundle.latex_snippets.append(figure_snippet(
        request_id, "learning_curve",
        f"Training and validation {score_name} against the training-set "
        f"size, averaged over {curves.k_folds}-fold cross-validation."))

    bundle.plots.append(PlotSpec(
        name="performance", kind="performance",
        title="Validation score against fit time",
        data={"fit_times": [_round(v, 6) for v in curves.fit_time_mean],
              "val_mean": [_round(v) for v in curves.val_score_mean],
              "score_name": score_name}))
    bundle.latex_snippets.append(figure_snippet(
        request_id, "performance",
        f"Validation {score_name} reached per second of training: the "
        "performance profile of the model."))

    bundle.plots.append(PlotSpec(
        name="scalability", kind="scalability",
        title="Fit time against training-set size",
        data={"sizes": sizes,
              "fit_times": [_round(v, 6) for v in curves.fit_time_mean],
              "fit_std": [_round(v, 6) for v in curves.fit_time_std]}))
    bundle.latex_snippets.append(figure_snippet(
        request_id, "scalability",
        "Seconds needed to fit the model as the number of processed rows "
        "grows: the scalability profile."))
    return bundle


def explain_importance(result, feature_names, request_id: str = "") -> ExplainBundle:
    """Bar chart of the normalised feature importances."""
    values = list(result.importances)
    if feature_names is None or len(feature_names) != len(values):
        raise ExplainError(
            f"feature_names must have {len(values)} entries, "
            f"got {len(feature_names or [])}")
    bundle = ExplainBundle(request_id=request_id)
    bundle.plots.append(PlotSpec(
        name="feature_importance", kind="bar",
        title="Normalised feature importance",
        data={"labels": list(feature_names),
              "values": [_round(v, 6) for v in values]}))
    bundle.latex_snippets.append(figure_snippet(
        request_id, "feature_importance",
        f"Normalised importance of each of the {len(values)} features for "
        f"this {result.task} dataset (importances sum to 1)."))
    return bundle


# --- persistence ------------------------------------------------------------------

def write_bundle(bundle: ExplainBundle, out_root, renderer=None) -> Path:
    """Write the bundle under out_root/<request_id>/ and return that path.

    Layout: plots/*.svg, tables/*.csv, latex/*.tex plus bundle.json, the
    index of every member (including the raw plot data series).
    """
    if renderer is None:
        from .render import render_plot
        renderer = render_plot

    root = Path(out_root) / bundle.request_id
    for sub in ("plots", "tables", "latex"):
        (root / sub).mkdir(parents=True, exist_ok=True)

    for plot in bundle.plots:
        renderer(plot, root / "plots" / plot.filename)
    for table in bundle.tables:
        with open(root / "tables" / f"{table.name}.csv", "w",
                  encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(table.headers)
            writer.writerows(table.rows)
    for snippet in bundle.latex_snippets:
        (root / "latex" / f"{snippet.name}.tex").write_text(
            snippet.source + "\n", encoding="utf-8")

    index = {
        "request_id": bundle.request_id,
        "plots": [{"name": p.name, "kind": p.kind, "title": p.title,
                   "file": f"plots/{p.filename}", "data": p.data}
                  for p in bundle.plots],
        "tables": [{"name": t.name, "file": f"tables/{t.name}.csv",
                    "headers": t.headers, "rows": t.rows}
                   for t in bundle.tables],
        "latex": [{"name": s.name, "file": f"latex/{s.name}.tex"}
                  for s in bundle.latex_snippets],
        "notes": bundle.notes,
    }
    (root / "bundle.json").write_text(json.dumps(index, indent=2) + "\n",
                                      encoding="utf-8")
    return root
