"""Symmetrization, quantile edge filtering, and density statistics for LONs.

The directed network is reduced to an undirected one by averaging the two
directed weights of every node pair (a missing direction contributes 0).
Self-loops are carried alongside the undirected edges but take no part in
edge filtering or connectivity; they are analyzed separately.

Filtering at level pi removes every edge whose weight is strictly below the
empirical pi-quantile of the non-self-loop weight distribution. The quantile
uses linear interpolation between order statistics: for sorted weights
x_0 <= ... <= x_{m-1} and h = (m - 1) * pi,

    q = x_floor(h) + (h - floor(h)) * (x_floor(h)+1 - x_floor(h))

so thresholds are reproducible across implementations. Edges exactly at the
quantile survive. Nodes are never removed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ComputeError
from .lon import LocalOptimum, Lon

UNFILTERED = "unfiltered"

DEFAULT_GRID = tuple(i / 100 for i in range(100))


@dataclass
class UndirectedLon:
    """Symmetrized LON; self-loops kept separately from undirected edges."""

    n: int
    nodes: list[LocalOptimum]
    edges: dict[tuple[int, int], float]
    self_loops: dict[int, float]
    provenance: dict = field(default_factory=dict)

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    @property
    def threshold(self):
        return self.provenance.get("threshold", UNFILTERED)

    def degrees(self) -> dict[int, int]:
        deg = {nd.id: 0 for nd in self.nodes}
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg


def symmetrize(lon: Lon) -> UndirectedLon:
    """Average directed weight pairs into single undirected links."""
    edges: dict[tuple[int, int], float] = {}
    self_loops: dict[int, float] = {}
    for (i, j), w in sorted(lon.edges.items()):
        if i == j:
            self_loops[i] = w
        else:
            key = (i, j) if i < j else (j, i)
            edges[key] = edges.get(key, 0.0) + w / 2.0
    return UndirectedLon(
        n=lon.n,
        nodes=list(lon.nodes),
        edges=dict(sorted(edges.items())),
        self_loops=self_loops,
        provenance={"source": lon.meta.get("name", ""), "threshold": UNFILTERED},
    )


def weight_quantile(weights, pi: float) -> float:
    """Linear-interpolation empirical quantile of a weight multiset."""
    if not 0.0 <= pi <= 1.0:
        raise ValueError(f"quantile level must lie in [0, 1], got {pi}")
    arr = np.asarray(list(weights), dtype=np.float64)
    if arr.size == 0:
        raise ValueError("cannot take a quantile of an empty weight set")
    return float(np.quantile(arr, pi, method="linear"))


def quantile_filter(g: UndirectedLon, pi: float) -> UndirectedLon:
    """Drop edges with weight strictly below the pi-quantile; keep all nodes."""
    if not g.edges:
        out = UndirectedLon(g.n, list(g.nodes), {}, dict(g.self_loops),
                            dict(g.provenance))
        out.provenance["threshold"] = pi
        return out
    q = weight_quantile(g.edges.values(), pi)
    kept = {e: w for e, w in g.edges.items() if w >= q}
    prov = dict(g.provenance)
    prov["threshold"] = pi
    prov["quantile_weight"] = q
    return UndirectedLon(g.n, list(g.nodes), kept, dict(g.self_loops), prov)


def is_connected(g: UndirectedLon) -> bool:
    """Single component over all nodes; self-loops do not count."""
    ids = [nd.id for nd in g.nodes]
    if len(ids) <= 1:
        return True
    parent = {i: i for i in ids}

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    components = len(ids)
    for i, j in g.edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            components -= 1
    return components == 1


@dataclass
class ThresholdResult:
    pi_star: float
    graph: UndirectedLon
    disconnecting_pi: float | None  # next grid value, as a maximality witness


def max_connected_threshold(g: UndirectedLon, grid=DEFAULT_GRID) -> ThresholdResult:
    """Largest grid quantile whose filtered graph stays connected.

    Connectivity is monotone non-increasing in pi (the surviving edge set
    shrinks), so the largest connected grid value is found by bisection.
    """
    grid = sorted(grid)
    if not grid:
        raise ValueError("threshold grid is empty")
    if not is_connected(quantile_filter(g, grid[0])):
        raise ComputeError(
            "graph is disconnected at the smallest grid threshold; "
            "the unfiltered network must be connected"
        )
    lo, hi = 0, len(grid) - 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if is_connected(quantile_filter(g, grid[mid])):
            lo = mid
        else:
            hi = mid - 1
    filtered = quantile_filter(g, grid[lo])
    witness = grid[lo + 1] if lo + 1 < len(grid) else None
    filtered.provenance["disconnecting_pi"] = witness
    return ThresholdResult(pi_star=grid[lo], graph=filtered, disconnecting_pi=witness)


@dataclass
class DensityStats:
    num_vertices: int
    num_edges: int  # directed, self-loops excluded
    num_self_loops: int
    edges_over_v_squared: float  # counts self-loops: complete-with-loops == 1.0
    mean_self_loop: float
    mean_out_weight: float


def density_stats(lon: Lon) -> DensityStats:
    """Size and weight summary of a directed LON.

    The edge/vertex-squared ratio counts self-loops so that a complete graph
    with all self-loops scores exactly 1.0, matching how density is tabulated
    for these networks; `num_edges` itself excludes self-loops.
    """
    v = len(lon.nodes)
    self_w = 0.0
    out_w = 0.0
    num_edges = 0
    num_self = 0
    for (i, j), w in lon.edges.items():
        if i == j:
            num_self += 1
            self_w += w
        else:
            num_edges += 1
            out_w += w
    return DensityStats(
        num_vertices=v,
        num_edges=num_edges,
        num_self_loops=num_self,
        edges_over_v_squared=(num_edges + num_self) / (v * v) if v else 0.0,
        mean_self_loop=self_w / v if v else 0.0,
        mean_out_weight=out_w / num_edges if num_edges else 0.0,
    )
