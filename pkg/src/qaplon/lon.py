"""Exact local optima network construction by exhaustive enumeration.

Every one of the n! configurations is mapped to the local optimum reached by
best-improvement descent under the pairwise-exchange neighborhood. Nodes of
the resulting directed graph are the optima; the edge weight from basin i to
basin j is the probability that a uniformly random single exchange applied to
a uniformly random member of basin i lands in basin j:

    w_ij = (1 / |b_i|) * sum_{s in b_i} #{neighbors of s in b_j} / (n(n-1)/2)

Weights are derived from exact integer transition counts, so rebuilding with
a different worker count or chunk size yields a bit-identical network.
"""

from __future__ import annotations

import math
import multiprocessing
from dataclasses import dataclass, field

import numpy as np
from threadpoolctl import threadpool_limits

from . import _kernels
from .errors import ComputeError, SizeGuardError
from .qap import QapInstance, as_perm, delta_cost, swap, swap_pairs

MAX_EXHAUSTIVE_N = 12

_TAU_CACHE: dict[int, dict[int, list[np.ndarray]]] = {}

# fork-shared state for worker processes (copy-on-write)
_SHARED: dict = {}


@dataclass
class LocalOptimum:
    """A strict local optimum with its basin cardinality."""

    id: int
    perm: tuple[int, ...] | None
    fitness: float
    basin_size: int


@dataclass
class Lon:
    """Directed weighted local optima network, self-loops included."""

    n: int
    nodes: list[LocalOptimum]
    edges: dict[tuple[int, int], float]
    meta: dict = field(default_factory=dict)

    @property
    def num_neighbors(self) -> int:
        return self.n * (self.n - 1) // 2

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    def out_weights(self, i: int) -> dict[int, float]:
        return {j: w for (a, j), w in self.edges.items() if a == i}


def best_improvement(inst: QapInstance, start) -> np.ndarray:
    """Terminal optimum of steepest descent from `start`.

    Moves to the strictly best improving neighbor each step; among equally
    good improving neighbors the first in lexicographic (i<j) swap order
    wins. A configuration with no strictly improving neighbor is returned
    unchanged.
    """
    perm = as_perm(start, inst.n)
    pairs = swap_pairs(inst.n)
    while True:
        best_delta = 0
        best_pair = None
        for i, j in pairs:
            d = delta_cost(inst, perm, i, j)
            if d < best_delta:
                best_delta = d
                best_pair = (i, j)
        if best_pair is None:
            return perm
        perm = swap(perm, *best_pair)


def _tau_tables(n: int) -> dict[int, list[np.ndarray]]:
    tables = _TAU_CACHE.get(n)
    if tables is None:
        tables = _kernels.build_tau_tables(n)
        _TAU_CACHE[n] = tables
    return tables


def _pass_a_task(bounds: tuple[int, int]) -> tuple[int, np.ndarray]:
    start, stop = bounds
    s = _SHARED
    succ = _kernels.successor_chunk(s["a"], s["b"], s["n"], start, stop,
                                    s["fast"], s["coeff"])
    return start, succ.astype(np.int32)


def _pass_b_task(bounds: tuple[int, int]) -> tuple[np.ndarray, np.ndarray | None]:
    start, stop = bounds
    s = _SHARED
    acc = None
    keys_acc: list[np.ndarray] = []
    cnt_acc: list[np.ndarray] = []
    for cs in range(start, stop, s["chunk"]):
        ce = min(cs + s["chunk"], stop)
        dense, sparse_cnt = _kernels.edge_count_chunk(
            s["n"], cs, ce, s["basin"], s["V"], s["taus"]
        )
        if sparse_cnt is None:
            acc = dense if acc is None else acc + dense
        else:
            keys_acc.append(dense)
            cnt_acc.append(sparse_cnt)
    if acc is not None:
        return acc, None
    return np.concatenate(keys_acc), np.concatenate(cnt_acc)


def _chunk_bounds(nf: int, chunk: int) -> list[tuple[int, int]]:
    return [(s, min(s + chunk, nf)) for s in range(0, nf, chunk)]


def _worker_ranges(nf: int, chunk: int, tasks: int) -> list[tuple[int, int]]:
    """Contiguous chunk-aligned ranges; partitioning never affects results."""
    nchunks = math.ceil(nf / chunk)
    per = math.ceil(nchunks / tasks)
    ranges = []
    for t in range(0, nchunks, per):
        start = t * chunk
        stop = min((t + per) * chunk, nf)
        ranges.append((start, stop))
    return ranges


def _run_tasks(fn, tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    ctx = multiprocessing.get_context("fork")
    with ctx.Pool(processes=workers) as pool:
        return pool.map(fn, tasks)


def build_lon(inst: QapInstance, *, workers: int = 1,
              chunk_size: int = _kernels.DEFAULT_CHUNK,
              meta: dict | None = None) -> Lon:
    """Exhaustively enumerate the search space and assemble the exact LON.

    Refuses n > 12: rank bookkeeping uses 32-bit indices and 13! already
    exceeds any sensible memory budget for exhaustive enumeration.

    BLAS is pinned to one thread for the duration: parallelism belongs to
    the process level here, and multi-threaded GEMMs in concurrent builds
    burn CPU in spin-waits without speeding anything up.
    """
    with threadpool_limits(limits=1, user_api="blas"):
        return _build_lon_single_threaded_blas(
            inst, workers=workers, chunk_size=chunk_size, meta=meta
        )


def _build_lon_single_threaded_blas(inst: QapInstance, *, workers: int,
                                    chunk_size: int, meta: dict | None) -> Lon:
    n = inst.n
    if n < 2:
        raise ValueError("LON construction needs n >= 2")
    if n > MAX_EXHAUSTIVE_N:
        raise SizeGuardError(
            f"n={n} implies {n}! = {math.factorial(n)} configurations; "
            f"exhaustive enumeration is limited to n <= {MAX_EXHAUSTIVE_N}"
        )
    nf = math.factorial(n)
    npairs = n * (n - 1) // 2
    a = np.ascontiguousarray(inst.dist)
    b = np.ascontiguousarray(inst.flow)
    fast = _kernels.symmetric_fast_path_ok(a, b, n)
    pi, pj = _kernels.pair_arrays(n)
    coeff = _kernels.delta_coefficients(a, pi, pj) if fast else None

    _SHARED.clear()
    _SHARED.update({"a": a, "b": b, "n": n, "fast": fast, "coeff": coeff,
                    "chunk": chunk_size})

    # pass A: best-improving successor of every configuration
    succ = np.empty(nf, dtype=np.int32)
    for start, chunk_succ in _run_tasks(
        _pass_a_task, _chunk_bounds(nf, chunk_size), workers
    ):
        succ[start : start + chunk_succ.shape[0]] = chunk_succ

    optima_ranks, basin = _kernels.resolve_basins(succ)
    del succ
    V = optima_ranks.shape[0]
    # narrow the basin table: pass B gathers it at random, so size matters
    if V <= np.iinfo(np.uint8).max:
        basin = basin.astype(np.uint8)
    elif V <= np.iinfo(np.uint16).max:
        basin = basin.astype(np.uint16)
    sizes = np.bincount(basin, minlength=V).astype(np.int64)
    if int(sizes.sum()) != nf:
        raise ComputeError("basin sizes do not partition the search space")

    # pass B: exact integer transition counts between basins
    taus = _tau_tables(n)
    _SHARED.update({"basin": basin, "V": V, "taus": taus})
    results = _run_tasks(
        _pass_b_task, _worker_ranges(nf, chunk_size, max(workers, 1) * 4), workers
    )
    _SHARED.clear()

    dense_total = None
    sparse_keys: list[np.ndarray] = []
    sparse_cnts: list[np.ndarray] = []
    for first, second in results:
        if second is None:
            dense_total = first if dense_total is None else dense_total + first
        else:
            sparse_keys.append(first)
            sparse_cnts.append(second)

    if dense_total is not None:
        counts_by_key = dense_total.ravel()
        keys = np.flatnonzero(counts_by_key)
        cnts = counts_by_key[keys]
        row_totals = dense_total.sum(axis=1)
    else:
        all_keys = np.concatenate(sparse_keys)
        all_cnts = np.concatenate(sparse_cnts)
        keys, inverse = np.unique(all_keys, return_inverse=True)
        cnts = np.zeros(keys.shape[0], dtype=np.int64)
        np.add.at(cnts, inverse, all_cnts)
        row_totals = np.zeros(V, dtype=np.int64)
        np.add.at(row_totals, keys // V, cnts)

    if not np.array_equal(row_totals, sizes * npairs):
        raise ComputeError(
            "transition-count row sums disagree with basin sizes; "
            "edge accumulation is corrupt"
        )

    perms = _kernels.unrank_batch(optima_ranks, n)
    pidx = perms.astype(np.intp)
    G = b[pidx[:, :, None], pidx[:, None, :]]
    costs = np.einsum("xij,ij->x", G, a)
    nodes = [
        LocalOptimum(
            id=i,
            perm=tuple(int(x) for x in perms[i]),
            fitness=float(-costs[i]),
            basin_size=int(sizes[i]),
        )
        for i in range(V)
    ]

    edges: dict[tuple[int, int], float] = {}
    src = keys // V
    dst = keys % V
    denom = sizes[src].astype(np.float64) * npairs
    weights = cnts / denom
    for i, j, w in zip(src.tolist(), dst.tolist(), weights.tolist()):
        edges[(i, j)] = w

    final_meta = {"n": n, "name": inst.name}
    if meta:
        final_meta.update(meta)
    return Lon(n=n, nodes=nodes, edges=edges, meta=final_meta)


def global_optimum(lon: Lon) -> LocalOptimum:
    """Node with maximal fitness; ties go to the lowest-ranked permutation.

    Node ids are assigned in increasing permutation rank, so the tie rule is
    equivalent to the lowest id.
    """
    if not lon.nodes:
        raise ValueError("empty network has no global optimum")
    return max(lon.nodes, key=lambda nd: (nd.fitness, -nd.id))
