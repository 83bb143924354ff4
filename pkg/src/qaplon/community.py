"""Weighted modularity and three community detectors for optima networks.

Modularity of a partition follows the Newman-Girvan form

    Q = sum_c [ W_c / W - (S_c / (2 W))^2 ]

with W the total (non-self-loop) edge weight, W_c the intra-community weight
and S_c the summed weighted degrees of community c. Self-loops are excluded
from both the numerator and the degrees; they live in a separate structure
and would only shift Q uniformly.

Detectors:

* `greedy_communities` -- agglomerative merging of the community pair with
  the best modularity gain, deterministic tie-breaking.
* `spinglass_communities` -- simulated annealing over bounded community
  labels maximizing Q (the spin-glass ground-state objective at unit
  coupling), seed-deterministic.
* `mcl` -- Markov clustering on the original directed weighted network by
  alternating expansion and inflation of the column-stochastic transition
  matrix until attractors emerge.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .lon import Lon
from .transform import UndirectedLon, symmetrize

GREEDY = "greedy"
SPINGLASS = "spinglass"
MCL = "mcl"


@dataclass
class Partition:
    assignment: dict[int, int]
    k: int
    q: float
    algorithm: str
    source: str = ""
    params: dict = field(default_factory=dict)
    seed: int | None = None


def _canonical(assignment: dict[int, int]) -> tuple[dict[int, int], int]:
    """Relabel communities 0..k-1 ordered by their smallest member node."""
    first_member: dict[int, int] = {}
    for node in sorted(assignment):
        c = assignment[node]
        if c not in first_member:
            first_member[c] = node
    order = sorted(first_member, key=lambda c: first_member[c])
    remap = {c: i for i, c in enumerate(order)}
    return {node: remap[c] for node, c in sorted(assignment.items())}, len(order)


def modularity(g: UndirectedLon, assignment: dict[int, int],
               weighted: bool = True) -> float:
    """Q of the given node->community map on g; self-loops ignored."""
    node_ids = {nd.id for nd in g.nodes}
    missing = node_ids - set(assignment)
    if missing:
        raise ValueError(f"assignment is missing nodes {sorted(missing)[:5]}")
    total = 0.0
    intra: dict[int, float] = {}
    degree: dict[int, float] = {}
    for (i, j), w in g.edges.items():
        w = w if weighted else 1.0
        total += w
        ci, cj = assignment[i], assignment[j]
        degree[ci] = degree.get(ci, 0.0) + w
        degree[cj] = degree.get(cj, 0.0) + w
        if ci == cj:
            intra[ci] = intra.get(ci, 0.0) + w
    if total == 0.0:
        return 0.0
    q = 0.0
    for c in degree:
        q += intra.get(c, 0.0) / total - (degree[c] / (2.0 * total)) ** 2
    return q


def greedy_communities(g: UndirectedLon, weighted: bool = True) -> Partition:
    """Agglomerative modularity optimization.

    Starts from singletons and repeatedly merges the community pair with the
    largest positive gain

        dQ = w(c1, c2) / W - deg(c1) * deg(c2) / (2 W^2),

    stopping when no merge improves Q. Ties break on the smallest
    (community id, community id) pair; a community is identified by the
    smallest node it contains, so the procedure is deterministic and
    relabeling-equivariant.
    """
    ids = sorted(nd.id for nd in g.nodes)
    if not g.edges:
        assignment, k = _canonical({i: i for i in ids})
        return Partition(assignment, k, 0.0, GREEDY,
                         source=g.provenance.get("source", ""))

    total = 0.0
    deg: dict[int, float] = {i: 0.0 for i in ids}
    between: dict[int, dict[int, float]] = {i: {} for i in ids}
    for (i, j), w in g.edges.items():
        w = w if weighted else 1.0
        total += w
        deg[i] += w
        deg[j] += w
        between[i][j] = between[i].get(j, 0.0) + w
        between[j][i] = between[j].get(i, 0.0) + w

    comm: dict[int, int] = {i: i for i in ids}  # node -> community (min member)
    members: dict[int, list[int]] = {i: [i] for i in ids}
    generation: dict[int, int] = {i: 0 for i in ids}

    def gain(c1: int, c2: int) -> float:
        w12 = between[c1].get(c2, 0.0)
        return w12 / total - deg[c1] * deg[c2] / (2.0 * total * total)

    heap: list[tuple[float, int, int, int, int]] = []
    for c1 in ids:
        for c2 in between[c1]:
            if c1 < c2:
                heapq.heappush(heap, (-gain(c1, c2), c1, c2, 0, 0))

    while heap:
        neg_dq, c1, c2, g1, g2 = heapq.heappop(heap)
        if generation.get(c1) != g1 or generation.get(c2) != g2:
            continue
        if -neg_dq <= 0.0:
            break
        keep, gone = (c1, c2) if c1 < c2 else (c2, c1)
        for node in members[gone]:
            comm[node] = keep
        members[keep].extend(members[gone])
        del members[gone]
        deg[keep] += deg.pop(gone)
        nbrs_gone = between.pop(gone)
        between[keep].pop(gone, None)
        nbrs_gone.pop(keep, None)
        for other, w in nbrs_gone.items():
            between[other].pop(gone, None)
            between[keep][other] = between[keep].get(other, 0.0) + w
            between[other][keep] = between[keep][other]
        generation.pop(gone)
        generation[keep] += 1
        for other in between[keep]:
            a, b = (keep, other) if keep < other else (other, keep)
            heapq.heappush(
                heap, (-gain(a, b), a, b, generation[a], generation[b])
            )

    assignment, k = _canonical(comm)
    q = modularity(g, assignment, weighted=weighted)
    return Partition(assignment, k, q, GREEDY,
                     source=g.provenance.get("source", ""))


def spinglass_communities(g: UndirectedLon, *, max_k: int = 20,
                          t_initial: float = 0.5, cooling: float = 0.995,
                          sweeps: int = 2000, seed: int = 0,
                          weighted: bool = True) -> Partition:
    """Annealed maximization of Q over at most max_k community labels.

    One sweep proposes |V| single-node label moves; worsening moves are
    accepted with probability exp(dQ / T) and the temperature decays
    geometrically per sweep. The best assignment ever seen is returned, with
    empty labels compacted. Identical seeds give identical partitions.
    """
    if max_k < 2:
        raise ValueError("max_k must be >= 2")
    params = {"max_k": max_k, "t_initial": t_initial, "cooling": cooling,
              "sweeps": sweeps}
    ids = sorted(nd.id for nd in g.nodes)
    source = g.provenance.get("source", "")
    if not g.edges or len(ids) == 1:
        assignment, k = _canonical({i: i for i in ids})
        return Partition(assignment, k, 0.0, SPINGLASS, source=source,
                         params=params, seed=seed)

    index = {node: x for x, node in enumerate(ids)}
    V = len(ids)
    adj: list[list[tuple[int, float]]] = [[] for _ in range(V)]
    total = 0.0
    deg = np.zeros(V)
    for (i, j), w in g.edges.items():
        w = w if weighted else 1.0
        xi, xj = index[i], index[j]
        adj[xi].append((xj, w))
        adj[xj].append((xi, w))
        total += w
        deg[xi] += w
        deg[xj] += w

    rng = np.random.Generator(np.random.PCG64(seed))
    spins = rng.integers(0, max_k, size=V)
    comm_deg = np.zeros(max_k)
    for x in range(V):
        comm_deg[spins[x]] += deg[x]
    intra = np.zeros(max_k)
    for x in range(V):
        for y, w in adj[x]:
            if x < y and spins[x] == spins[y]:
                intra[spins[x]] += w
    q_now = float(np.sum(intra / total) - np.sum((comm_deg / (2 * total)) ** 2))

    best_q = q_now
    best_spins = spins.copy()
    temp = t_initial
    two_w2 = 2.0 * total * total
    for _ in range(sweeps):
        nodes_pick = rng.integers(0, V, size=V)
        label_pick = rng.integers(0, max_k - 1, size=V)
        accept_u = rng.random(V)
        for step in range(V):
            x = int(nodes_pick[step])
            a = int(spins[x])
            b = int(label_pick[step])
            if b >= a:
                b += 1
            k_to_a = 0.0
            k_to_b = 0.0
            for y, w in adj[x]:
                s = spins[y]
                if s == a:
                    k_to_a += w
                elif s == b:
                    k_to_b += w
            dq = (k_to_b - k_to_a) / total - deg[x] * (
                comm_deg[b] - comm_deg[a] + deg[x]
            ) / two_w2
            if dq >= 0.0 or accept_u[step] < math.exp(dq / temp):
                spins[x] = b
                comm_deg[a] -= deg[x]
                comm_deg[b] += deg[x]
                q_now += dq
                if q_now > best_q + 1e-15:
                    best_q = q_now
                    best_spins = spins.copy()
        temp *= cooling

    assignment, k = _canonical({node: int(best_spins[index[node]]) for node in ids})
    q = modularity(g, assignment, weighted=weighted)
    return Partition(assignment, k, q, SPINGLASS, source=source,
                     params=params, seed=seed)


@dataclass
class MclResult:
    partition: Partition | None
    converged: bool
    iterations: int
    rescaled: bool


def mcl(lon: Lon, *, inflation: float = 2.0, prune_eps: float = 1e-5,
        max_iters: int = 200, rescale: bool = True,
        attractor_eps: float = 1e-6) -> MclResult:
    """Markov clustering on the directed weighted LON.

    Columns of the transition matrix are the per-source outgoing
    distributions (LON rows already sum to one, self-loops included). The
    optional rescale step max-normalizes each column before the stochastic
    normalization; for already-stochastic input it is mathematically neutral
    and is recorded in the result. Iteration alternates expansion (matrix
    squaring) and inflation (entrywise power + column renormalization) with
    pruning of entries below prune_eps (a column's largest entry is never
    pruned). Convergence is a numerical fixed point; hitting max_iters first
    yields a result with partition=None carrying the iteration count.

    Nodes sharing an attractor set form one cluster; a node supported by
    several clusters goes to the one holding most of its column mass, ties
    to the smallest cluster id. The reported q is the weighted modularity of
    the clustering on the symmetrized unfiltered network.
    """
    if inflation <= 1.0:
        raise ValueError("inflation must exceed 1")
    ids = sorted(nd.id for nd in lon.nodes)
    V = len(ids)
    index = {node: x for x, node in enumerate(ids)}
    M = np.zeros((V, V))
    for (i, j), w in lon.edges.items():
        M[index[j], index[i]] = w  # column = source node
    if rescale:
        colmax = M.max(axis=0)
        colmax[colmax == 0.0] = 1.0
        M /= colmax
    colsum = M.sum(axis=0)
    zero_cols = colsum == 0.0
    if np.any(zero_cols):  # isolated source: make it hold its own mass
        M[np.flatnonzero(zero_cols), np.flatnonzero(zero_cols)] = 1.0
        colsum = M.sum(axis=0)
    M /= colsum

    converged = False
    iterations = 0
    for iterations in range(1, max_iters + 1):
        E = M @ M
        np.power(E, inflation, out=E)
        keep_max = np.argmax(E, axis=0)
        small = E < prune_eps
        small[keep_max, np.arange(V)] = False
        E[small] = 0.0
        E /= E.sum(axis=0)
        diff = float(np.max(np.abs(E - M)))
        M = E
        if diff < 1e-9:
            converged = True
            break

    if not converged:
        return MclResult(partition=None, converged=False,
                         iterations=iterations, rescaled=rescale)

    attractors = np.flatnonzero(np.diag(M) > attractor_eps)
    parent = {int(a): int(a) for a in attractors}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a in attractors:
        for b in attractors:
            if a < b and (M[a, b] > 0.0 or M[b, a] > 0.0):
                ra, rb = find(int(a)), find(int(b))
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
    roots = sorted({find(int(a)) for a in attractors})
    cluster_of_attractor = {int(a): roots.index(find(int(a))) for a in attractors}
    n_clusters = len(roots)

    assignment: dict[int, int] = {}
    extra = n_clusters
    for node in ids:
        x = index[node]
        mass = np.zeros(n_clusters)
        for a in attractors:
            if M[a, x] > 0.0:
                mass[cluster_of_attractor[int(a)]] += M[a, x]
        if mass.sum() == 0.0:
            assignment[node] = extra  # unsupported column: own singleton
            extra += 1
        else:
            assignment[node] = int(np.argmax(mass))  # ties: smallest id

    canonical, k = _canonical(assignment)
    q = modularity(symmetrize(lon), canonical, weighted=True)
    part = Partition(canonical, k, q, MCL,
                     source=lon.meta.get("name", ""),
                     params={"inflation": inflation, "prune_eps": prune_eps,
                             "max_iters": max_iters, "rescale": rescale})
    return MclResult(partition=part, converged=True,
                     iterations=iterations, rescaled=rescale)


def cross_evaluate(partitions: dict[str, Partition],
                   unfiltered: UndirectedLon) -> dict[str, float]:
    """Weighted Q of each algorithm's partition on the unfiltered network."""
    node_ids = {nd.id for nd in unfiltered.nodes}
    out: dict[str, float] = {}
    for name, part in partitions.items():
        if set(part.assignment) != node_ids:
            raise ValueError(
                f"partition {name!r} covers a different node set than the graph"
            )
        out[name] = modularity(unfiltered, part.assignment, weighted=True)
    return out
