"""Vectorized batch kernels for exhaustive search-space enumeration.

The full-enumeration builder sweeps all n! permutations in fixed-size rank
chunks. Everything here operates on batches:

* Lehmer unranking/ranking of whole chunks.
* Swap-cost deltas for all n(n-1)/2 position pairs of every permutation in a
  chunk. Symmetric zero-diagonal integer instances take a matmul fast path
  that is exact in float64 (all intermediates are integers well below 2**53);
  everything else takes a per-pair exact path.
* Ranks of all pairwise-swap neighbors. Swapping positions (i, j) only
  changes Lehmer digits i..j, so the rank map decomposes as identity on the
  quotient by (n-i)! plus a fixed involution on the low (n-i)! block that
  depends only on (n-i, j-i). Those involutions are precomputed once per
  suffix length ("tau tables"); pairs with i=0 use an incremental row scheme
  instead of a table over the whole space.

Chunk results depend only on the chunk bounds, never on worker scheduling,
and all edge statistics are accumulated as exact integer counts, so builds
are bit-reproducible for any worker count.
"""

from __future__ import annotations

import math

import numpy as np

DEFAULT_CHUNK = 1 << 17

# Above this bound the exact-in-float64 argument for the matmul delta path
# breaks down and the slower per-pair integer path is used instead.
_FLOAT64_EXACT_BOUND = 2**53


def factorials(n: int) -> list[int]:
    f = [1] * (n + 1)
    for i in range(1, n + 1):
        f[i] = f[i - 1] * i
    return f


def pair_arrays(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Swap pairs (i<j) in lexicographic order as two index arrays."""
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    pi = np.array([p[0] for p in pairs], dtype=np.intp)
    pj = np.array([p[1] for p in pairs], dtype=np.intp)
    return pi, pj


def unrank_batch(ranks: np.ndarray, n: int) -> np.ndarray:
    """Permutations at the given lexicographic ranks; (B, n) int8."""
    B = ranks.shape[0]
    f = factorials(n)
    rem = ranks.astype(np.int64, copy=True)
    avail = np.tile(np.arange(n, dtype=np.int8), (B, 1))
    out = np.empty((B, n), dtype=np.int8)
    for k in range(n):
        w = f[n - 1 - k]
        d = rem // w
        rem -= d * w
        d = d.astype(np.intp)
        out[:, k] = np.take_along_axis(avail, d[:, None], axis=1)[:, 0]
        if k < n - 1:
            m = n - k - 1
            cols = np.arange(m, dtype=np.intp)[None, :]
            avail = np.take_along_axis(avail, cols + (cols >= d[:, None]), axis=1)
    return out


def rank_batch(perms: np.ndarray) -> np.ndarray:
    """Lehmer ranks of a batch of permutations; (B,) int64."""
    B, n = perms.shape
    f = factorials(n)
    w = np.array([f[n - 1 - k] for k in range(n)], dtype=np.int64)
    cmp = perms[:, :, None] > perms[:, None, :]
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)
    digits = (cmp & upper[None, :, :]).sum(axis=2, dtype=np.int64)
    return digits @ w


def swap_rows(perms: np.ndarray, pi: np.ndarray, pj: np.ndarray) -> np.ndarray:
    """Copy of each row with its own (pi[b], pj[b]) positions exchanged."""
    out = perms.copy()
    rows = np.arange(perms.shape[0])
    tmp = out[rows, pi].copy()
    out[rows, pi] = out[rows, pj]
    out[rows, pj] = tmp
    return out


# ---------------------------------------------------------------------------
# swap-cost deltas
# ---------------------------------------------------------------------------


def delta_coefficients(a: np.ndarray, pi: np.ndarray, pj: np.ndarray) -> np.ndarray:
    """Coefficient matrix M with delta(b, pair) = 2 * (G_flat @ M)[b, pair].

    For symmetric zero-diagonal matrices the swap delta of pair (r, s) is
    2 * sum_{k != r,s} (a[r,k] - a[s,k]) * (G[s,k] - G[r,k]) where
    G[x, k] = flow[p_x, p_k]; expanding over the flat G layout gives one
    (n*n, n_pairs) matrix so a whole chunk's deltas become a single GEMM.
    """
    n = a.shape[0]
    M = np.zeros((n * n, pi.shape[0]))
    af = a.astype(np.float64)
    for c in range(pi.shape[0]):
        r, s = int(pi[c]), int(pj[c])
        for k in range(n):
            if k == r or k == s:
                continue
            w = af[r, k] - af[s, k]
            M[s * n + k, c] += w
            M[r * n + k, c] -= w
    return M


def _delta_columns_symmetric(b: np.ndarray, P: np.ndarray,
                             coeff: np.ndarray) -> np.ndarray:
    """Single-GEMM fast path; requires a, b symmetric with zero diagonal."""
    B, n = P.shape
    Pi = P.astype(np.intp)
    bf = b.astype(np.float64)
    G = bf[Pi[:, :, None], Pi[:, None, :]].reshape(B, n * n)
    D = G @ coeff
    D *= 2.0
    return D


def _delta_columns_general(a: np.ndarray, b: np.ndarray, P: np.ndarray,
                           pi: np.ndarray, pj: np.ndarray) -> np.ndarray:
    """Per-pair path; exact for integer matrices, works for asymmetric input."""
    B, n = P.shape
    dtype = np.int64 if np.issubdtype(a.dtype, np.integer) else np.float64
    af = a.astype(dtype)
    bflat = b.astype(dtype).ravel()
    Pn = P.astype(np.int64)
    out = np.empty((B, pi.shape[0]), dtype=dtype)
    for c in range(pi.shape[0]):
        r, s = int(pi[c]), int(pj[c])
        u = Pn[:, r]
        v = Pn[:, s]
        ks = [k for k in range(n) if k != r and k != s]
        PK = Pn[:, ks]
        acc = ((bflat[v[:, None] * n + PK] - bflat[u[:, None] * n + PK])
               * (af[r, ks] - af[s, ks])[None, :]).sum(axis=1)
        acc += ((bflat[PK * n + v[:, None]] - bflat[PK * n + u[:, None]])
                * (af[ks, r] - af[ks, s])[None, :]).sum(axis=1)
        acc += (af[r, r] - af[s, s]) * (bflat[v * n + v] - bflat[u * n + u])
        acc += (af[r, s] - af[s, r]) * (bflat[v * n + u] - bflat[u * n + v])
        out[:, c] = acc
    return out


def symmetric_fast_path_ok(a: np.ndarray, b: np.ndarray, n: int) -> bool:
    if not (np.issubdtype(a.dtype, np.integer) and np.issubdtype(b.dtype, np.integer)):
        return False
    if np.any(np.diag(a) != 0) or np.any(np.diag(b) != 0):
        return False
    if not (np.array_equal(a, a.T) and np.array_equal(b, b.T)):
        return False
    amax = int(a.max(initial=0))
    bmax = int(b.max(initial=0))
    # 2 * (4 H-terms + cross term) stays far below this product bound
    return 16 * (n + 1) * max(amax, 1) * max(bmax, 1) < _FLOAT64_EXACT_BOUND


def delta_columns(a: np.ndarray, b: np.ndarray, P: np.ndarray,
                  pi: np.ndarray, pj: np.ndarray, fast: bool,
                  coeff: np.ndarray | None = None) -> np.ndarray:
    if fast:
        if coeff is None:
            coeff = delta_coefficients(a, pi, pj)
        return _delta_columns_symmetric(b, P, coeff)
    return _delta_columns_general(a, b, P, pi, pj)


# ---------------------------------------------------------------------------
# neighbor ranks
# ---------------------------------------------------------------------------


def _first_position_neighbor_ranks(P: np.ndarray, ranks: np.ndarray) -> np.ndarray:
    """Ranks of neighbors for pairs (0, j), j = 1..n-1; columns in j order.

    Incremental over j: mid_w[t] carries sum_{1<=k<j} [p_k < t] * (n-1-k)! and
    suf_cnt[t] carries #{m > j : p_m < t}.
    """
    B, n = P.shape
    f = factorials(n)
    w = [f[n - 1 - k] for k in range(n)]
    rows = np.arange(B)
    tvals = np.arange(n + 1, dtype=np.int8)
    Pi = P.astype(np.int32)
    u = Pi[:, 0]
    mid_w = np.zeros((B, n + 1), dtype=np.int64)
    suf_cnt = (
        tvals[None, :].astype(np.int16)
        - (P[:, 0, None] < tvals[None, :])
        - (P[:, 1, None] < tvals[None, :])
    )
    out = np.empty((B, n - 1), dtype=np.int64)
    for j in range(1, n):
        v = Pi[:, j]
        lo = np.minimum(u, v)
        hi = np.maximum(u, v)
        mid = mid_w[rows, hi] - mid_w[rows, lo + 1]
        sign = np.where(u < v, 1, -1)
        l_j = suf_cnt[rows, v].astype(np.int64)
        lp_j = suf_cnt[rows, u].astype(np.int64)
        delta = (v - u).astype(np.int64) * w[0] + sign * mid + (lp_j - l_j) * w[j]
        out[:, j - 1] = ranks + delta
        if j < n - 1:
            mid_w += (P[:, j, None] < tvals[None, :]) * np.int64(w[j])
            suf_cnt -= P[:, j + 1, None] < tvals[None, :]
    return out


def build_tau_tables(n: int, chunk: int = DEFAULT_CHUNK) -> dict[int, list[np.ndarray]]:
    """Low-block swap involutions for all suffix lengths m = 2..n-1.

    taus[m][d-1][l] is the rank of (permutation of size m at rank l with
    positions 0 and d exchanged). Tables for suffix length m are shared by
    every swap pair (i, i+d) with n - i == m.
    """
    taus: dict[int, list[np.ndarray]] = {}
    for m in range(2, n):
        mf = math.factorial(m)
        tables = [np.empty(mf, dtype=np.int32) for _ in range(m - 1)]
        for start in range(0, mf, chunk):
            stop = min(start + chunk, mf)
            ranks = np.arange(start, stop, dtype=np.int64)
            P = unrank_batch(ranks, m)
            cols = _first_position_neighbor_ranks(P, ranks)
            for d in range(1, m):
                tables[d - 1][start:stop] = cols[:, d - 1]
        taus[m] = tables
    return taus


def neighbor_rank_columns(P: np.ndarray, ranks: np.ndarray, n: int,
                          taus: dict[int, list[np.ndarray]]) -> np.ndarray:
    """Ranks of all pairwise-swap neighbors; columns in lexicographic order."""
    B = P.shape[0]
    f = factorials(n)
    npairs = n * (n - 1) // 2
    out = np.empty((B, npairs), dtype=np.int64)
    out[:, : n - 1] = _first_position_neighbor_ranks(P, ranks)
    col = n - 1
    for i in range(1, n - 1):
        m = n - i
        F = f[m]
        lowmod = ranks % F
        base = ranks - lowmod
        tables = taus[m]
        for j in range(i + 1, n):
            out[:, col] = base + tables[j - i - 1][lowmod]
            col += 1
    return out


# ---------------------------------------------------------------------------
# chunk passes
# ---------------------------------------------------------------------------


def successor_chunk(a: np.ndarray, b: np.ndarray, n: int, start: int, stop: int,
                    fast: bool, coeff: np.ndarray | None = None) -> np.ndarray:
    """Best-improving successor rank per configuration; self where optimal.

    Ties among equal-best improving neighbors break to the first pair in
    lexicographic (i<j) order via argmin's first-occurrence rule.
    """
    ranks = np.arange(start, stop, dtype=np.int64)
    P = unrank_batch(ranks, n)
    pi, pj = pair_arrays(n)
    D = delta_columns(a, b, P, pi, pj, fast, coeff)
    best = np.argmin(D, axis=1)
    rows = np.arange(stop - start)
    improving = D[rows, best] < 0
    Q = swap_rows(P, pi[best], pj[best])
    succ = rank_batch(Q)
    return np.where(improving, succ, ranks)


def edge_count_chunk(n: int, start: int, stop: int, basin: np.ndarray, V: int,
                     taus: dict[int, list[np.ndarray]],
                     dense_limit: int = 1 << 26) -> tuple[np.ndarray, np.ndarray | None]:
    """Integer transition counts between basins for one rank chunk.

    Returns a dense (V, V) int64 matrix when V*V <= dense_limit, else a
    (keys, counts) pair with keys = src_basin * V + dst_basin.
    """
    ranks = np.arange(start, stop, dtype=np.int64)
    P = unrank_batch(ranks, n)
    NR = neighbor_rank_columns(P, ranks, n, taus)
    own = basin[start:stop].astype(np.int64)
    keys = own[:, None] * V + basin[NR]
    if V * V <= dense_limit:
        counts = np.bincount(keys.ravel(), minlength=V * V)
        return counts.reshape(V, V), None
    uniq, cnt = np.unique(keys.ravel(), return_counts=True)
    return uniq, cnt


def resolve_basins(succ: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Terminal optimum of every configuration via pointer doubling.

    Returns (optima_ranks ascending, basin ids per rank as uint32).
    """
    S = succ
    while True:
        T = S[S]
        if np.array_equal(T, S):
            break
        S = T
    nf = S.shape[0]
    optima = np.flatnonzero(S == np.arange(nf, dtype=S.dtype))
    basin = np.searchsorted(optima, S).astype(np.uint32)
    return optima.astype(np.int64), basin
