"""Null models, modularity significance, permutation ANOVA, assortativity.

The null model randomizes topology with connectivity-preserving double-edge
swaps while keeping the exact degree sequence: a swap replaces edges (u, v),
(x, y) by (u, x), (v, y) and is rejected if it would create a self-loop or
parallel edge or disconnect the graph. The number of attempted swaps is
20 * |E| by default. The original multiset of edge weights is then randomly
permuted onto the rewired edge set (alternatively all weights can be set to
one), so weighted detectors remain applicable.

Empirical p-values use add-one smoothing, (count + 1) / (m + 1), and never
report exact zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .community import GREEDY, SPINGLASS, Partition, greedy_communities, \
    spinglass_communities
from .errors import ComputeError
from .lon import Lon
from .transform import UndirectedLon

REWIRE_ATTEMPTS_PER_EDGE = 20


@dataclass
class RewireResult:
    graph: UndirectedLon
    swaps_done: int
    attempts: int
    warning: bool  # no swap was possible; the input graph was returned


def rewire_null(g: UndirectedLon, seed: int, *,
                attempts_per_edge: int = REWIRE_ATTEMPTS_PER_EDGE,
                weights: str = "permute") -> RewireResult:
    """Connected degree-preserving randomization of g; seed-deterministic."""
    if weights not in ("permute", "unit"):
        raise ValueError("weights must be 'permute' or 'unit'")
    edges = sorted(g.edges)
    m = len(edges)
    if m < 2:
        return RewireResult(graph=g, swaps_done=0, attempts=0, warning=True)
    rng = np.random.Generator(np.random.PCG64(seed))
    adj: dict[int, set[int]] = {nd.id: set() for nd in g.nodes}
    edge_set = set()
    for i, j in edges:
        adj[i].add(j)
        adj[j].add(i)
        edge_set.add((i, j))
    edge_list = list(edges)

    def connected_after(u, v):
        """Early-exit BFS: is v still reachable from u?"""
        if v in adj[u]:
            return True
        seen = {u}
        frontier = [u]
        while frontier:
            nxt = []
            for x in frontier:
                for y in adj[x]:
                    if y == v:
                        return True
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return False

    attempts = attempts_per_edge * m
    swaps_done = 0
    e_pick = rng.integers(0, m, size=2 * attempts)
    flip = rng.random(attempts) < 0.5
    for t in range(attempts):
        a_idx = int(e_pick[2 * t])
        b_idx = int(e_pick[2 * t + 1])
        if a_idx == b_idx:
            continue
        u, v = edge_list[a_idx]
        x, y = edge_list[b_idx]
        if flip[t]:
            x, y = y, x
        if len({u, v, x, y}) != 4:
            continue
        new1 = (min(u, x), max(u, x))
        new2 = (min(v, y), max(v, y))
        if new1 in edge_set or new2 in edge_set:
            continue
        old1 = (min(u, v), max(u, v))
        old2 = (min(x, y), max(x, y))
        edge_set.discard(old1)
        edge_set.discard(old2)
        adj[u].discard(v); adj[v].discard(u)
        adj[x].discard(y); adj[y].discard(x)
        edge_set.add(new1); edge_set.add(new2)
        adj[new1[0]].add(new1[1]); adj[new1[1]].add(new1[0])
        adj[new2[0]].add(new2[1]); adj[new2[1]].add(new2[0])
        if connected_after(u, v) and connected_after(x, y):
            edge_list[a_idx] = new1
            edge_list[b_idx] = new2
            swaps_done += 1
        else:  # roll back
            edge_set.discard(new1); edge_set.discard(new2)
            adj[new1[0]].discard(new1[1]); adj[new1[1]].discard(new1[0])
            adj[new2[0]].discard(new2[1]); adj[new2[1]].discard(new2[0])
            edge_set.add(old1); edge_set.add(old2)
            adj[u].add(v); adj[v].add(u)
            adj[x].add(y); adj[y].add(x)

    if swaps_done == 0:
        return RewireResult(graph=g, swaps_done=0, attempts=attempts, warning=True)

    new_edges = sorted(edge_set)
    if weights == "permute":
        pool = np.array([g.edges[e] for e in edges])
        pool = pool[rng.permutation(m)]
        edge_map = {e: float(w) for e, w in zip(new_edges, pool)}
    else:
        edge_map = {e: 1.0 for e in new_edges}
    out = UndirectedLon(
        n=g.n, nodes=list(g.nodes), edges=edge_map,
        self_loops=dict(g.self_loops),
        provenance={**g.provenance, "null_model_seed": seed},
    )
    return RewireResult(graph=out, swaps_done=swaps_done, attempts=attempts,
                        warning=False)


@dataclass
class NullModelEnsemble:
    source: str
    samples: list[float]
    mean_q: float
    sd_q: float
    algorithm: str
    seed: int
    n_requested: int
    n_failed: int
    degenerate: bool  # zero spread (or too few samples): z-scores undefined


def _make_detector(detector):
    if callable(detector):
        return detector
    if detector == GREEDY:
        return lambda graph, seed: greedy_communities(graph)
    if detector == SPINGLASS:
        return lambda graph, seed: spinglass_communities(graph, seed=seed)
    raise ValueError(f"unknown detector {detector!r}")


def null_ensemble(g: UndirectedLon, detector, m: int, seed: int) -> NullModelEnsemble:
    """Detector Q scores over m independent rewired copies of g.

    Per-sample seeds are spawned from the master seed by counter, so the
    ensemble is reproducible and order-independent.
    """
    if m < 2:
        raise ValueError("ensemble size must be >= 2")
    run = _make_detector(detector)
    name = detector if isinstance(detector, str) else getattr(
        detector, "__name__", "custom")
    samples: list[float] = []
    n_failed = 0
    for k in range(m):
        rewire_ss, detect_ss = np.random.SeedSequence(
            entropy=seed, spawn_key=(k,)
        ).spawn(2)
        null = rewire_null(g, int(rewire_ss.generate_state(1)[0]))
        part = run(null.graph, int(detect_ss.generate_state(1)[0]))
        if part is None:
            n_failed += 1
            continue
        samples.append(part.q)
    if n_failed > 0 and len(samples) < math.ceil(0.9 * m):
        raise ComputeError(
            f"null ensemble degenerate: only {len(samples)}/{m} samples succeeded"
        )
    arr = np.array(samples)
    mean_q = float(arr.mean())
    sd_q = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return NullModelEnsemble(
        source=g.provenance.get("source", ""), samples=samples,
        mean_q=mean_q, sd_q=sd_q, algorithm=name, seed=seed,
        n_requested=m, n_failed=n_failed, degenerate=sd_q == 0.0,
    )


@dataclass
class SignificanceResult:
    p_value: float
    z_score: float | None  # None when the ensemble spread is zero
    degenerate: bool


def q_significance(q_obs: float, ens: NullModelEnsemble) -> SignificanceResult:
    """Add-one-smoothed upper-tail p and z of q_obs against the ensemble."""
    m = len(ens.samples)
    count = sum(1 for q in ens.samples if q >= q_obs)
    p = (count + 1) / (m + 1)
    if ens.sd_q == 0.0:
        return SignificanceResult(p_value=p, z_score=None, degenerate=True)
    z = (q_obs - ens.mean_q) / ens.sd_q
    return SignificanceResult(p_value=p, z_score=z, degenerate=False)


# ---------------------------------------------------------------------------
# two-factor permutation ANOVA
# ---------------------------------------------------------------------------


@dataclass
class AnovaResult:
    p_class: float
    p_algorithm: float
    p_interaction: float
    n_permutations: int
    observed_f: tuple[float, float, float]


def _safe_f(ms_effect: float, ms_error: float) -> float:
    if ms_effect <= 0.0:
        return 0.0
    if ms_error <= 0.0:
        return math.inf
    return ms_effect / ms_error


def _two_way_f(y: np.ndarray, ai: np.ndarray, bi: np.ndarray,
               na: int, nb: int, r: int) -> tuple[float, float, float]:
    grand = y.mean()
    a_means = np.array([y[ai == i].mean() for i in range(na)])
    b_means = np.array([y[bi == j].mean() for j in range(nb)])
    cell_means = np.empty((na, nb))
    for i in range(na):
        for j in range(nb):
            cell_means[i, j] = y[(ai == i) & (bi == j)].mean()
    ss_a = nb * r * float(((a_means - grand) ** 2).sum())
    ss_b = na * r * float(((b_means - grand) ** 2).sum())
    inter = cell_means - a_means[:, None] - b_means[None, :] + grand
    ss_ab = r * float((inter**2).sum())
    resid = y - cell_means[ai, bi]
    ss_e = float((resid**2).sum())
    ms_a = ss_a / (na - 1)
    ms_b = ss_b / (nb - 1)
    ms_ab = ss_ab / ((na - 1) * (nb - 1))
    ms_e = ss_e / (na * nb * (r - 1))
    return _safe_f(ms_a, ms_e), _safe_f(ms_b, ms_e), _safe_f(ms_ab, ms_e)


def permutation_anova(records, n_perm: int = 999, seed: int = 0) -> AnovaResult:
    """Two-factor fixed-effects permutation test on (class, algorithm, q) rows.

    Requires a balanced design with at least two replicates per cell. Main
    effects are tested by freely permuting the responses; the interaction is
    tested with restricted permutations that shuffle responses only within
    each level of the class factor (a documented, conservative scheme).
    """
    rows = [(str(c), str(a), float(q)) for c, a, q in records]
    classes = sorted({c for c, _, _ in rows})
    algos = sorted({a for _, a, _ in rows})
    if len(classes) < 2 or len(algos) < 2:
        raise ValueError("need at least two levels per factor")
    counts: dict[tuple[str, str], int] = {}
    for c, a, _ in rows:
        counts[(c, a)] = counts.get((c, a), 0) + 1
    expected = len(rows) // (len(classes) * len(algos))
    bad = sorted(
        cell for cell in
        {(c, a) for c in classes for a in algos}
        if counts.get(cell, 0) != expected or counts.get(cell, 0) < 2
    )
    if bad or expected * len(classes) * len(algos) != len(rows):
        raise ValueError(f"unbalanced or sparse design; offending cells: {bad}")

    ai = np.array([classes.index(c) for c, _, _ in rows])
    bi = np.array([algos.index(a) for _, a, _ in rows])
    y = np.array([q for _, _, q in rows])
    if float(((y - y.mean()) ** 2).sum()) == 0.0:
        raise ComputeError("responses carry no variance; F statistics undefined")

    na, nb, r = len(classes), len(algos), expected
    f_a, f_b, f_ab = _two_way_f(y, ai, bi, na, nb, r)

    rng = np.random.Generator(np.random.PCG64(seed))
    count_a = count_b = count_ab = 0
    class_groups = [np.flatnonzero(ai == i) for i in range(na)]
    for _ in range(n_perm):
        y_free = y[rng.permutation(len(y))]
        pa, pb, _ = _two_way_f(y_free, ai, bi, na, nb, r)
        if pa >= f_a:
            count_a += 1
        if pb >= f_b:
            count_b += 1
        y_within = y.copy()
        for idx in class_groups:
            y_within[idx] = y_within[idx[rng.permutation(idx.shape[0])]]
        _, _, pab = _two_way_f(y_within, ai, bi, na, nb, r)
        if pab >= f_ab:
            count_ab += 1

    return AnovaResult(
        p_class=(count_a + 1) / (n_perm + 1),
        p_algorithm=(count_b + 1) / (n_perm + 1),
        p_interaction=(count_ab + 1) / (n_perm + 1),
        n_permutations=n_perm,
        observed_f=(f_a, f_b, f_ab),
    )


# ---------------------------------------------------------------------------
# fitness assortativity
# ---------------------------------------------------------------------------


@dataclass
class AssortativityReport:
    spearman_r: float
    slope: float
    n_points: int
    graph_kind: str  # "unfiltered" or "filtered"
    excluded: int  # nodes without any non-self outgoing edge
    low_n: bool


def _rankdata(x: np.ndarray) -> np.ndarray:
    """Average ranks (1-based) with midrank tie handling."""
    order = np.argsort(x, kind="stable")
    ranks = np.empty(len(x))
    sx = x[order]
    i = 0
    while i < len(x):
        j = i
        while j + 1 < len(x) and sx[j + 1] == sx[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(x: np.ndarray, y: np.ndarray) -> float:
    """Spearman rank correlation: Pearson correlation of midranks."""
    rx = _rankdata(np.asarray(x, dtype=float))
    ry = _rankdata(np.asarray(y, dtype=float))
    rx -= rx.mean()
    ry -= ry.mean()
    denom = math.sqrt(float((rx**2).sum()) * float((ry**2).sum()))
    if denom == 0.0:
        return 0.0
    return float((rx * ry).sum() / denom)


def fitness_assortativity(lon: Lon, filtered: UndirectedLon | None = None
                          ) -> AssortativityReport:
    """Correlation between node fitness and transition-weighted neighbor fitness.

    For each node i the neighbor summary is
    y_i = sum_j w_ij * f_j / sum_j w_ij over non-self edges: directed
    outgoing weights on the unfiltered network, averaged undirected weights
    when a filtered graph is supplied. Nodes without any qualifying edge are
    excluded and counted. Returns the Spearman correlation (average-rank tie
    handling) and the least-squares slope of y on x.
    """
    if filtered is None:
        graph_kind = "unfiltered"
        fitness = {nd.id: nd.fitness for nd in lon.nodes}
        acc: dict[int, tuple[float, float]] = {}
        for (i, j), w in lon.edges.items():
            if i == j:
                continue
            sw, swf = acc.get(i, (0.0, 0.0))
            acc[i] = (sw + w, swf + w * fitness[j])
        node_ids = [nd.id for nd in lon.nodes]
    else:
        graph_kind = "filtered"
        fitness = {nd.id: nd.fitness for nd in filtered.nodes}
        acc = {}
        for (i, j), w in filtered.edges.items():
            swi, swfi = acc.get(i, (0.0, 0.0))
            acc[i] = (swi + w, swfi + w * fitness[j])
            swj, swfj = acc.get(j, (0.0, 0.0))
            acc[j] = (swj + w, swfj + w * fitness[i])
        node_ids = [nd.id for nd in filtered.nodes]

    xs, ys = [], []
    excluded = 0
    for i in node_ids:
        if i not in acc or acc[i][0] == 0.0:
            excluded += 1
            continue
        xs.append(fitness[i])
        ys.append(acc[i][1] / acc[i][0])
    if len(xs) < 2:
        raise ValueError(
            f"need at least 2 nodes with outgoing edges, have {len(xs)}"
        )
    x = np.array(xs)
    y = np.array(ys)
    var_x = float(((x - x.mean()) ** 2).sum())
    slope = float(((x - x.mean()) * (y - y.mean())).sum() / var_x) if var_x else 0.0
    return AssortativityReport(
        spearman_r=spearman(x, y),
        slope=slope,
        n_points=len(xs),
        graph_kind=graph_kind,
        excluded=excluded,
        low_n=len(xs) < 3,
    )
