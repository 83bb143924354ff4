"""QAP instances, permutations, cost evaluation, and the 2-exchange neighborhood.

A problem instance couples an n x n distance matrix `dist` with an n x n flow
matrix `flow`; a candidate solution is a permutation p where p[i] is the
location assigned to facility i. The cost of p is

    C(p) = sum_{i,j} dist[i, j] * flow[p[i], p[j]]

summed over all ordered pairs (i, j). Fitness is -C(p), so maximizing fitness
minimizes cost. Permutations are ranked densely in [0, n!) with the Lehmer
code (factorial number system), which enumerates them in lexicographic order.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np


@dataclass
class QapInstance:
    """Distance/flow matrices plus a label. Arrays are frozen on construction."""

    n: int
    dist: np.ndarray
    flow: np.ndarray
    name: str = ""

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"instance size must be positive, got {self.n}")
        self.dist = np.asarray(self.dist)
        self.flow = np.asarray(self.flow)
        for label, m in (("dist", self.dist), ("flow", self.flow)):
            if m.shape != (self.n, self.n):
                raise ValueError(
                    f"{label} matrix must be {self.n}x{self.n}, got {m.shape}"
                )
            if not np.issubdtype(m.dtype, np.number):
                raise ValueError(f"{label} matrix must be numeric, got {m.dtype}")
            if np.issubdtype(m.dtype, np.floating) and not np.all(np.isfinite(m)):
                raise ValueError(f"{label} matrix contains non-finite entries")
            if np.any(m < 0):
                raise ValueError(f"{label} matrix contains negative entries")
        if np.any(np.diag(self.dist) != 0) or np.any(np.diag(self.flow) != 0):
            warnings.warn(
                f"instance {self.name or '<unnamed>'} has nonzero diagonal entries; "
                "diagonal terms contribute to every cost",
                stacklevel=2,
            )
        self.dist.setflags(write=False)
        self.flow.setflags(write=False)

    @property
    def is_integer(self) -> bool:
        return np.issubdtype(self.dist.dtype, np.integer) and np.issubdtype(
            self.flow.dtype, np.integer
        )

    @property
    def is_symmetric(self) -> bool:
        return bool(
            np.array_equal(self.dist, self.dist.T)
            and np.array_equal(self.flow, self.flow.T)
        )


def identity_perm(n: int) -> np.ndarray:
    return np.arange(n, dtype=np.int64)


def as_perm(p, n: int | None = None) -> np.ndarray:
    """Validate and normalize a permutation to an int64 array."""
    arr = np.asarray(p, dtype=np.int64)
    if arr.ndim != 1:
        raise ValueError(f"permutation must be 1-D, got shape {arr.shape}")
    m = arr.shape[0]
    if n is not None and m != n:
        raise ValueError(f"permutation has length {m}, expected {n}")
    seen = np.zeros(m, dtype=bool)
    if np.any(arr < 0) or np.any(arr >= m):
        raise ValueError("permutation values must lie in [0, n)")
    seen[arr] = True
    if not seen.all():
        raise ValueError("permutation is not a bijection of {0..n-1}")
    return arr


def cost(inst: QapInstance, p) -> int | float:
    """Total cost sum_{i,j} dist[i,j] * flow[p[i],p[j]] over all ordered pairs."""
    perm = as_perm(p, inst.n)
    permuted = inst.flow[perm][:, perm]
    total = np.einsum("ij,ij->", inst.dist, permuted)
    return int(total) if inst.is_integer else float(total)


def swap(p, i: int, j: int) -> np.ndarray:
    """Copy of p with positions i and j exchanged."""
    q = np.array(p, dtype=np.int64)
    q[i], q[j] = q[j], q[i]
    return q


def delta_cost(inst: QapInstance, p, i: int, j: int) -> int | float:
    """cost(swap(p, i, j)) - cost(p) in O(n) arithmetic.

    Handles asymmetric matrices and nonzero diagonals; for the integer path
    the result is exact.
    """
    if i == j:
        raise ValueError("delta_cost requires i != j")
    n = inst.n
    if not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"swap indices ({i}, {j}) out of range for n={n}")
    perm = as_perm(p, n)
    a = inst.dist
    b = inst.flow
    u = perm[i]
    v = perm[j]
    k = np.ones(n, dtype=bool)
    k[i] = k[j] = False
    pk = perm[k]
    d = np.einsum("k,k->", a[i, k] - a[j, k], b[v, pk] - b[u, pk])
    d += np.einsum("k,k->", a[k, i] - a[k, j], b[pk, v] - b[pk, u])
    d += (a[i, i] - a[j, j]) * (b[v, v] - b[u, u])
    d += (a[i, j] - a[j, i]) * (b[v, u] - b[u, v])
    return int(d) if inst.is_integer else float(d)


def swap_pairs(n: int) -> list[tuple[int, int]]:
    """Index pairs (i, j) with i < j in lexicographic order."""
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def neighbors(p) -> list[np.ndarray]:
    """All n(n-1)/2 pairwise-exchange neighbors, lexicographic (i<j) order."""
    perm = as_perm(p)
    return [swap(perm, i, j) for i, j in swap_pairs(perm.shape[0])]


def perm_rank(p) -> int:
    """Lehmer-code rank of p within the lexicographic enumeration of S_n."""
    perm = as_perm(p)
    n = perm.shape[0]
    r = 0
    w = math.factorial(n - 1)
    for k in range(n - 1):
        digit = int(np.count_nonzero(perm[k + 1 :] < perm[k]))
        r += digit * w
        w //= n - 1 - k
    return r


def perm_unrank(r: int, n: int) -> np.ndarray:
    """Permutation of size n at lexicographic rank r; inverse of perm_rank."""
    nf = math.factorial(n)
    if not 0 <= r < nf:
        raise ValueError(f"rank {r} out of range [0, {n}!)")
    avail = list(range(n))
    out = np.empty(n, dtype=np.int64)
    w = nf // n
    rem = r
    for k in range(n):
        d, rem = divmod(rem, w)
        out[k] = avail.pop(d)
        if k < n - 1:
            w //= n - 1 - k
    return out
