"""Render figures and a markdown summary from soficlab CSV/JSON artifacts.

The CSV schema is consumed verbatim: experiment_id,n,probe,r,count,
denominator,overflow,bound_side.  Plotted values are the untouched ratios
count/denominator (no smoothing); decay plots use a log-scale y axis and
overlay the closed-form reference 4*k^(1-m).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

CSV_COLUMNS = ["experiment_id", "n", "probe", "r", "count", "denominator",
               "overflow", "bound_side"]


class SchemaMismatch(ValueError):
    def __init__(self, path: str, got: list):
        missing = [c for c in CSV_COLUMNS if c not in got]
        extra = [c for c in got if c not in CSV_COLUMNS]
        super().__init__(
            f"{path}: column mismatch (missing {missing or 'none'}, "
            f"unexpected {extra or 'none'})")
        self.missing = missing
        self.extra = extra


@dataclass
class ReportSpec:
    csv_paths: list
    out_dir: str
    plots: tuple = ("decay", "integrability", "covolume")


@dataclass
class RenderedReport:
    figures: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    markdown_path: Optional[str] = None
    plotted: dict = field(default_factory=dict)  # figure -> (xs, ys, ref)


def read_rows(path: str) -> list:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise SchemaMismatch(path, [])
    header = lines[0].split(",")
    if header != CSV_COLUMNS:
        raise SchemaMismatch(path, header)
    rows = []
    for line in lines[1:]:
        parts = line.split(",")
        rows.append({
            "experiment_id": parts[0], "n": int(parts[1]), "probe": parts[2],
            "r": int(parts[3]), "count": int(parts[4]),
            "denominator": int(parts[5]), "overflow": int(parts[6]),
            "bound_side": parts[7],
        })
    return rows


def _sidecar(path: str) -> dict:
    side = os.path.splitext(path)[0] + ".json"
    if os.path.exists(side):
        with open(side) as fh:
            return json.load(fh)
    return {}


def _sidecar_k(doc: dict) -> int:
    try:
        return int(doc["config"]["map"]["k"])
    except (KeyError, TypeError, ValueError):
        return 2


def _fig_path(out_dir: str, stem: str, experiment: str, kind: str) -> str:
    return os.path.join(out_dir, f"{stem}__{experiment}__{kind}.png")


def render_decay(rows: list, k: int, path: str, report: RenderedReport) -> None:
    xs = [row["r"] for row in rows]
    ys = [row["count"] / row["denominator"] for row in rows]
    ref = [4.0 * k ** (1 - m) for m in xs]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(xs, ys, "o-", label="measured fraction")
    ax.plot(xs, ref, "--", label=f"4*{k}^(1-m)")
    ax.set_yscale("log")
    ax.set_xlabel("m")
    ax.set_ylabel("fraction")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    report.figures.append(path)
    report.plotted[path] = {"x": xs, "y": ys, "reference": ref}


def render_trend(rows_by_n: dict, ylabel: str, path: str, report: RenderedReport,
                 logy: bool = False) -> None:
    xs = sorted(rows_by_n)
    ys = [rows_by_n[n] for n in xs]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(xs, ys, "s-")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel(ylabel)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    report.figures.append(path)
    report.plotted[path] = {"x": xs, "y": ys}


def render_report(spec: ReportSpec) -> RenderedReport:
    os.makedirs(spec.out_dir, exist_ok=True)
    report = RenderedReport()
    constants_rows = []
    for path in spec.csv_paths:
        stem = os.path.splitext(os.path.basename(path))[0]
        rows = read_rows(path)
        if not rows:
            report.warnings.append(f"{path}: empty CSV, nothing to plot")
            continue
        doc = _sidecar(path)
        k = _sidecar_k(doc)
        by_exp: dict = {}
        for row in rows:
            by_exp.setdefault(row["experiment_id"], []).append(row)
        for exp_id in sorted(by_exp):
            erows = by_exp[exp_id]
            if exp_id == "lemma82" and "decay" in spec.plots:
                render_decay(erows, k, _fig_path(spec.out_dir, stem, exp_id, "decay"),
                             report)
            elif exp_id == "covolume" and "covolume" in spec.plots:
                ratios = {row["n"]: row["count"] / row["denominator"]
                          for row in erows}
                render_trend(ratios, "#target / #domain",
                             _fig_path(spec.out_dir, stem, exp_id, "trend"), report)
            elif exp_id == "integrability" and "integrability" in spec.plots:
                doc_sums = (doc.get("summary") or {}).get("sums") or {}
                finite = {p: s for p, s in doc_sums.items()
                          if isinstance(s, (int, float))}
                if finite:
                    xs = sorted(finite)
                    fig, ax = plt.subplots(figsize=(6, 4))
                    ax.bar(range(len(xs)), [finite[p] for p in xs])
                    ax.set_xticks(range(len(xs)), xs)
                    ax.set_ylabel("integrability sum")
                    figpath = _fig_path(spec.out_dir, stem, exp_id, "sums")
                    fig.tight_layout()
                    fig.savefig(figpath)
                    plt.close(fig)
                    report.figures.append(figpath)
                    report.plotted[figpath] = {"x": xs, "y": [finite[p] for p in xs]}
                else:
                    report.warnings.append(f"{path}: no finite sums to plot")
        fit = ((doc.get("summary") or {}).get("fit") or {})
        if fit:
            constants_rows.append((stem, fit.get("delta"), fit.get("c_prime"),
                                   fit.get("c_triple")))
    md = ["# soficlab report", ""]
    if constants_rows:
        md += ["## fitted constants", "",
               "| experiment | delta | C' | C''' |", "|---|---|---|---|"]
        for stem, delta, cp, ct in constants_rows:
            md.append(f"| {stem} | {delta} | {cp} | {ct} |")
        md.append("")
    md.append("## figures")
    md.append("")
    for f in report.figures:
        md.append(f"- {os.path.basename(f)}")
    if report.warnings:
        md += ["", "## warnings", ""]
        md += [f"- {w}" for w in report.warnings]
    md_path = os.path.join(spec.out_dir, "report.md")
    with open(md_path, "w") as fh:
        fh.write("\n".join(md) + "\n")
    report.markdown_path = md_path
    return report
