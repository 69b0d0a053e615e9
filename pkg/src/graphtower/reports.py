"""Deterministic CSV and text renderings of layers, towers and Kida reports.

Big integers are always written as decimal strings.
"""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path

from .graphs import Graph
from .iwasawa import IwasawaFit, KidaReport, Table1Report, TowerReport
from .voltage import DerivedLayer

__all__ = [
    "write_csv",
    "derived_vertex_rows",
    "derived_edge_rows",
    "write_derived_layer",
    "read_edge_list",
    "tower_rows",
    "fit_rows",
    "kida_rows",
    "kida_table",
    "table1_rows",
    "render_table",
]


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows([[_cell(x) for x in r] for r in rows])
    return buf.getvalue()


def _cell(x):
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    if isinstance(x, tuple):
        return " ".join(str(c) for c in x)
    return str(x)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(_csv_text(header, rows))
    return path


VERTEX_HEADER = ("vertex", "coset", "base_vertex")
EDGE_HEADER = ("edge", "src", "tgt", "gamma", "base_edge")


def derived_vertex_rows(layer: DerivedLayer):
    base = layer.voltage.base
    g = layer.graph
    return [(g.vertices[i], rep, base.vertices[v]) for i, (rep, v) in enumerate(layer.vertex_labels)]


def derived_edge_rows(layer: DerivedLayer, edge_names=None):
    """One row per unoriented edge, using the lower-indexed orientation."""
    g = layer.graph
    rows = []
    for e in g.undirected_edges():
        gamma, be = layer.edge_labels[e]
        if edge_names is not None:
            label = edge_names[be // 2] + ("" if be % 2 == 0 else "~")
        else:
            label = str(be)
        rows.append((f"d{e}", g.vertices[g.src[e]], g.vertices[g.tgt[e]], gamma, label))
    return rows


def write_derived_layer(layer: DerivedLayer, out_dir, stem: str, edge_names=None) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    vpath = write_csv(out_dir / f"{stem}_vertices.csv", VERTEX_HEADER, derived_vertex_rows(layer))
    epath = write_csv(out_dir / f"{stem}_edges.csv", EDGE_HEADER,
                      derived_edge_rows(layer, edge_names))
    return vpath, epath


def read_edge_list(vertices_csv, edges_csv) -> Graph:
    """Re-read a written layer as a plain graph (labels are ignored)."""
    with open(vertices_csv, newline="") as fh:
        names = [row["vertex"] for row in csv.DictReader(fh)]
    pos = {v: i for i, v in enumerate(names)}
    with open(edges_csv, newline="") as fh:
        pairs = [(pos[row["src"]], pos[row["tgt"]]) for row in csv.DictReader(fh)]
    return Graph.from_edges(names, pairs)


TOWER_HEADER = ("n", "|V|", "|E|", "kappa", "ordp")


def tower_rows(r: TowerReport):
    return list(zip(r.levels, r.vertex_counts, r.edge_counts, r.kappas, r.ordp))


FIT_HEADER = ("key", "value")


def fit_rows(fit: IwasawaFit, quotient: str = ""):
    rows = [("tower", quotient)] if quotient else []
    rows += [("lambda", fit.lam), ("mu", fit.mu), ("nu", fit.nu), ("n0", fit.n0),
             ("stabilized", fit.stabilized)]
    rows += [(f"residual_n{n}", d) for n, d in sorted(fit.residuals.items())]
    return rows


KIDA_VERTEX_HEADER = ("vertex", "star", "correction_term")


def kida_rows(k: KidaReport):
    rows = [
        ("star_holds", k.star_holds),
        ("mu_tilde", k.mu_tilde),
        ("mu_base", k.mu_base),
        ("lambda_tilde", k.lambda_tilde),
        ("lambda_base", k.lambda_base),
        ("degree", k.degree),
        ("lhs", k.lhs),
        ("rhs", k.rhs),
        ("mu_equivalence", k.mu_equivalence),
        ("identity_applies", k.identity_applies),
        ("identity_holds", k.identity_holds),
        ("verdict", k.verdict),
    ]
    rows += [(f"correction[{v}]", c) for v, c in k.correction_terms.items()]
    rows += [(f"star[{v}]", w) for v, w in k.star_witnesses.items()]
    return rows


def render_table(header, rows) -> str:
    cells = [[_cell(x) for x in header]] + [[_cell(x) for x in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def kida_table(k: KidaReport) -> str:
    out = ["Kida identity: lambda~ + 1 = #G (lambda + 1) - sum_v n_v (m_v - 1)", ""]
    out.append(render_table(("quantity", "value"), kida_rows(k)))
    return "\n".join(out)


TABLE1_HEADER = ("case", "row", "level", "expected", "observed", "passed")


def table1_rows(t: Table1Report):
    return [(c["case"], c["row"], c["level"], c["expected"], c["observed"], c["passed"])
            for c in t.cells]
