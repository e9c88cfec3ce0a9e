"""Serialization of experiment outputs: CSV for tables, JSON for aggregates.

Every file starts with a header block (``#`` lines in CSV, a ``header`` key
in JSON) holding the tool version, master seed and resolved config. Floats
are written with ``repr`` so reruns are byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from likecent.simulation import AggregateDataset, BinnedCurve

FILES = (
    "ensembles.csv",
    "nodes.csv",
    "neighbor_curve.csv",
    "likedness_curve.csv",
    "histogram.csv",
    "aggregate.json",
)


def _num(x):
    x = float(x)
    return None if math.isnan(x) else x


def _cell(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    return "" if math.isnan(x) else repr(x)


def header_block(header: dict) -> str:
    return "".join(f"# {k}: {json.dumps(v, sort_keys=True)}\n" for k, v in header.items())


def _csv(header: dict, columns: list[str], rows) -> str:
    buf = io.StringIO()
    buf.write(header_block(header))
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def read_table(text: str) -> tuple[list[str], dict[str, list[str]]]:
    """Parse one of our CSV files: skip ``#`` lines, return columns as strings."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    rows = list(csv.reader(lines))
    if not rows:
        return [], {}
    names = [h.strip() for h in rows[0]]
    cols: dict[str, list[str]] = {h: [] for h in names}
    for row in rows[1:]:
        for h, v in zip(names, row):
            cols[h].append(v.strip())
    return names, cols


def _curve_rows(curve: BinnedCurve):
    for b in range(curve.counts.size):
        yield b, curve.edges[b], curve.edges[b + 1], curve.counts[b], curve.mean_x[b], curve.mean_y[b]


def render(dataset: AggregateDataset, header: dict) -> dict[str, str]:
    """All output files of one experiment as ``{filename: text}``."""
    cents = dataset.centralities
    n = dataset.mean_likedness.size
    out = {}
    out["ensembles.csv"] = _csv(
        header,
        ["ensemble", "node", "likedness", "desirability"],
        ((r.index, i, r.likedness[i], r.desirability[i]) for r in dataset.results for i in range(n)),
    )
    out["nodes.csv"] = _csv(
        header,
        ["node", "degree", "betweenness", "closeness", "eigenvector", "mean_likedness", "mean_desirability"],
        (
            (i, int(cents["degree"][i]), cents["betweenness"][i], cents["closeness"][i],
             cents["eigenvector"][i], dataset.mean_likedness[i], dataset.mean_desirability[i])
            for i in range(n)
        ),
    )
    c = dataset.curve
    out["neighbor_curve.csv"] = _csv(
        header,
        ["bin", "lower", "upper", "count", "mean_own", "mean_neighbor", "scaled_summary"],
        (
            (b, c.edges[b], c.edges[b + 1], c.counts[b], c.mean_own[b], c.mean_neighbor[b], c.scaled_summary[b])
            for b in range(c.counts.size)
        ),
    )
    out["likedness_curve.csv"] = _csv(
        header,
        ["bin", "lower", "upper", "count", "mean_likedness", "mean_desirability"],
        _curve_rows(dataset.likedness_curve),
    )
    e, h = dataset.histogram_edges, dataset.histogram_counts
    out["histogram.csv"] = _csv(
        header, ["bin", "lower", "upper", "count"], ((b, e[b], e[b + 1], h[b]) for b in range(h.size))
    )
    agg = {
        "header": header,
        "accepted": dataset.accepted,
        "failures": [{"ensemble": f.index, "reason": f.reason, "residual": _num(f.residual)} for f in dataset.failures],
        "max_residual": max((r.residual for r in dataset.results), default=None),
        "nodes": {
            "mean_likedness": [_num(v) for v in dataset.mean_likedness],
            "mean_desirability": [_num(v) for v in dataset.mean_desirability],
        },
        "centralities": {k: [_num(v) for v in vals] for k, vals in cents.items()},
        "neighbor_curve": {
            "edges": [_num(v) for v in c.edges],
            "counts": [int(v) for v in c.counts],
            "mean_own": [_num(v) for v in c.mean_own],
            "mean_neighbor": [_num(v) for v in c.mean_neighbor],
            "scaled_summary": [_num(v) for v in c.scaled_summary],
            "over_representation": [[_num(v) for v in row] for row in c.over_representation],
            "correlation": _num(c.correlation),
        },
        "likedness_curve": {
            "edges": [_num(v) for v in dataset.likedness_curve.edges],
            "counts": [int(v) for v in dataset.likedness_curve.counts],
            "mean_likedness": [_num(v) for v in dataset.likedness_curve.mean_x],
            "mean_desirability": [_num(v) for v in dataset.likedness_curve.mean_y],
        },
        "histogram": {"edges": [_num(v) for v in e], "counts": [int(v) for v in h]},
    }
    out["aggregate.json"] = json.dumps(agg, indent=1, sort_keys=True) + "\n"
    return out


def write_all(out_dir: Path, files: dict[str, str]) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, text in files.items():
        path = out_dir / name
        path.write_text(text)
        paths.append(path)
    return paths
