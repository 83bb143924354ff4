"""Serialization of LONs: JSON artifacts, GraphML, CSV, and Graphviz DOT.

JSON is the pipeline interchange format and round-trips exactly (floats are
written with `repr`, which is shortest-round-trip in Python 3). CSV exports
use RFC-4180 headers `id,fitness,basin_size` and `src,dst,weight`; GraphML
carries the same attributes. DOT output sizes nodes by basin size and darkens
them with improving fitness for direct rendering of the network figures.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from xml.sax.saxutils import escape

from .errors import ParseError
from .lon import LocalOptimum, Lon
from .transform import UndirectedLon

FORMATS = ("graphml", "edge_csv", "node_csv", "dot")


def _fmt(x: float) -> str:
    return repr(float(x))


# ---------------------------------------------------------------------------
# JSON artifacts
# ---------------------------------------------------------------------------


def _nodes_payload(nodes):
    return [
        {
            "id": nd.id,
            "perm": list(nd.perm) if nd.perm is not None else None,
            "fitness": nd.fitness,
            "basin_size": nd.basin_size,
        }
        for nd in nodes
    ]


def _nodes_from_payload(payload):
    return [
        LocalOptimum(
            id=int(d["id"]),
            perm=tuple(d["perm"]) if d["perm"] is not None else None,
            fitness=float(d["fitness"]),
            basin_size=int(d["basin_size"]),
        )
        for d in payload
    ]


def lon_to_json(lon: Lon) -> str:
    doc = {
        "kind": "lon",
        "n": lon.n,
        "meta": lon.meta,
        "nodes": _nodes_payload(lon.nodes),
        "edges": [[i, j, w] for (i, j), w in sorted(lon.edges.items())],
    }
    return json.dumps(doc, sort_keys=True, indent=1)


def lon_from_json(text: str) -> Lon:
    doc = json.loads(text)
    if doc.get("kind") != "lon":
        raise ParseError(f"expected a lon artifact, got kind={doc.get('kind')!r}")
    edges = {(int(i), int(j)): float(w) for i, j, w in doc["edges"]}
    return Lon(n=int(doc["n"]), nodes=_nodes_from_payload(doc["nodes"]),
               edges=edges, meta=doc.get("meta", {}))


def ulon_to_json(g: UndirectedLon) -> str:
    doc = {
        "kind": "ulon",
        "n": g.n,
        "provenance": g.provenance,
        "nodes": _nodes_payload(g.nodes),
        "edges": [[i, j, w] for (i, j), w in sorted(g.edges.items())],
        "self_loops": {str(i): w for i, w in sorted(g.self_loops.items())},
    }
    return json.dumps(doc, sort_keys=True, indent=1)


def ulon_from_json(text: str) -> UndirectedLon:
    doc = json.loads(text)
    if doc.get("kind") != "ulon":
        raise ParseError(f"expected a ulon artifact, got kind={doc.get('kind')!r}")
    return UndirectedLon(
        n=int(doc["n"]),
        nodes=_nodes_from_payload(doc["nodes"]),
        edges={(int(i), int(j)): float(w) for i, j, w in doc["edges"]},
        self_loops={int(k): float(v) for k, v in doc["self_loops"].items()},
        provenance=doc.get("provenance", {}),
    )


def save_artifact(obj, path) -> None:
    text = lon_to_json(obj) if isinstance(obj, Lon) else ulon_to_json(obj)
    Path(path).write_text(text + "\n", encoding="utf-8")


def load_lon(path) -> Lon:
    return lon_from_json(Path(path).read_text(encoding="utf-8"))


def load_ulon(path) -> UndirectedLon:
    return ulon_from_json(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def export_node_csv(g, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "fitness", "basin_size"])
        for nd in g.nodes:
            writer.writerow([nd.id, _fmt(nd.fitness), nd.basin_size])


def export_edge_csv(g, path) -> None:
    """Directed LONs write every edge; undirected ones write i<j rows plus
    self-loops as src==dst rows."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["src", "dst", "weight"])
        for (i, j), w in sorted(g.edges.items()):
            writer.writerow([i, j, _fmt(w)])
        if isinstance(g, UndirectedLon):
            for i, w in sorted(g.self_loops.items()):
                writer.writerow([i, i, _fmt(w)])


def _read_csv_rows(path, expected_header):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != expected_header:
            raise ParseError(f"{path}: expected header {expected_header}, got {header}")
        return list(reader)


def import_lon_csv(node_path, edge_path, n: int, directed: bool = True):
    """Rebuild a graph from node+edge CSVs; permutations are not stored in
    CSV, so imported nodes carry perm=None."""
    nodes = [
        LocalOptimum(id=int(r[0]), perm=None, fitness=float(r[1]), basin_size=int(r[2]))
        for r in _read_csv_rows(node_path, ["id", "fitness", "basin_size"])
    ]
    rows = _read_csv_rows(edge_path, ["src", "dst", "weight"])
    if directed:
        edges = {(int(r[0]), int(r[1])): float(r[2]) for r in rows}
        return Lon(n=n, nodes=nodes, edges=edges, meta={})
    edges = {}
    self_loops = {}
    for r in rows:
        i, j, w = int(r[0]), int(r[1]), float(r[2])
        if i == j:
            self_loops[i] = w
        else:
            edges[(min(i, j), max(i, j))] = w
    return UndirectedLon(n=n, nodes=nodes, edges=edges, self_loops=self_loops,
                         provenance={})


# ---------------------------------------------------------------------------
# GraphML
# ---------------------------------------------------------------------------


def export_graphml(g, path) -> None:
    directed = isinstance(g, Lon)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
        ' <key id="fitness" for="node" attr.name="fitness" attr.type="double"/>',
        ' <key id="basin_size" for="node" attr.name="basin_size" attr.type="long"/>',
        ' <key id="weight" for="edge" attr.name="weight" attr.type="double"/>',
        f' <graph id="{escape(str(g.__class__.__name__))}" '
        f'edgedefault="{"directed" if directed else "undirected"}">',
    ]
    for nd in g.nodes:
        lines.append(f'  <node id="n{nd.id}">')
        lines.append(f'   <data key="fitness">{_fmt(nd.fitness)}</data>')
        lines.append(f'   <data key="basin_size">{nd.basin_size}</data>')
        lines.append("  </node>")
    items = sorted(g.edges.items())
    if not directed:
        items += [((i, i), w) for i, w in sorted(g.self_loops.items())]
    for (i, j), w in items:
        lines.append(f'  <edge source="n{i}" target="n{j}">')
        lines.append(f'   <data key="weight">{_fmt(w)}</data>')
        lines.append("  </edge>")
    lines += [" </graph>", "</graphml>", ""]
    Path(path).write_text("\n".join(lines), encoding="utf-8")


# ---------------------------------------------------------------------------
# DOT
# ---------------------------------------------------------------------------


def export_dot(g, path) -> None:
    """Node area tracks basin size; darker fill means better fitness."""
    directed = isinstance(g, Lon)
    fits = [nd.fitness for nd in g.nodes]
    lo, hi = min(fits), max(fits)
    span = (hi - lo) or 1.0
    max_basin = max(nd.basin_size for nd in g.nodes)
    lines = ["digraph lon {" if directed else "graph lon {"]
    lines.append(' node [style=filled, shape=circle, fontcolor="#cc4444"];')
    for nd in g.nodes:
        t = (nd.fitness - lo) / span
        gray = int(round(90 - 65 * t))
        size = 0.25 + 0.75 * (nd.basin_size / max_basin) ** 0.5
        lines.append(
            f' n{nd.id} [label="{nd.id}", fillcolor="gray{gray}", '
            f"width={size:.3f}, height={size:.3f}];"
        )
    arrow = "->" if directed else "--"
    items = sorted(g.edges.items())
    if not directed:
        items += [((i, i), w) for i, w in sorted(g.self_loops.items())]
    for (i, j), w in items:
        pw = max(0.3, 4.0 * w)
        lines.append(f' n{i} {arrow} n{j} [weight={_fmt(w)}, penwidth={pw:.2f}];')
    lines.append("}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def export_graph(g, fmt: str, path) -> None:
    """Single entry point over the supported export formats."""
    if fmt == "graphml":
        export_graphml(g, path)
    elif fmt == "edge_csv":
        export_edge_csv(g, path)
    elif fmt == "node_csv":
        export_node_csv(g, path)
    elif fmt == "dot":
        export_dot(g, path)
    else:
        raise ValueError(f"unknown export format {fmt!r}; choose from {FORMATS}")
