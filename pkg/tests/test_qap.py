"""Cost, delta, neighborhood, and ranking contracts, checked against
brute-force references."""

import itertools
import math

import numpy as np
import pytest

from qaplon import (QapInstance, cost, delta_cost, identity_perm, neighbors,
                    perm_rank, perm_unrank, swap, swap_pairs)
from qaplon._kernels import (build_tau_tables, delta_columns,
                             neighbor_rank_columns, pair_arrays, rank_batch,
                             symmetric_fast_path_ok, unrank_batch)

from naive_oracle import (all_perms, naive_cost, random_asymmetric_instance,
                          random_symmetric_instance)


def _zero_diag(m):
    np.fill_diagonal(m, 0)
    return m


def toy_2x2():
    return QapInstance(
        n=2,
        dist=np.array([[0, 1], [1, 0]], dtype=np.int64),
        flow=np.array([[0, 3], [3, 0]], dtype=np.int64),
        name="toy2",
    )


def test_cost_zero_flow_is_zero(rng):
    n = 5
    inst = QapInstance(
        n=n,
        dist=_zero_diag(rng.integers(0, 20, size=(n, n)).astype(np.int64)),
        flow=np.zeros((n, n), dtype=np.int64),
        name="zeroflow",
    )
    for _ in range(10):
        p = rng.permutation(n)
        assert cost(inst, p) == 0


def test_cost_2x2_identity():
    assert cost(toy_2x2(), [0, 1]) == 6


def test_cost_matches_triple_loop_oracle_all_permutations(rng):
    inst = random_symmetric_instance(rng, 3)
    for p in all_perms(3):
        assert cost(inst, p) == naive_cost(inst, p)


def test_cost_rejects_wrong_length():
    with pytest.raises(ValueError):
        cost(toy_2x2(), [0, 1, 2])
    with pytest.raises(ValueError):
        cost(toy_2x2(), [0, 0])


def test_instance_validation():
    with pytest.raises(ValueError):
        QapInstance(n=2, dist=np.zeros((3, 3)), flow=np.zeros((2, 2)))
    with pytest.raises(ValueError):
        QapInstance(n=2, dist=-np.ones((2, 2)), flow=np.zeros((2, 2)))
    with pytest.warns(UserWarning):
        QapInstance(n=2, dist=np.eye(2), flow=np.zeros((2, 2)))


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_delta_cost_equals_full_recompute_exhaustively(rng, n):
    for make in (random_symmetric_instance, random_asymmetric_instance):
        inst = make(rng, n)
        for _ in range(8):
            p = rng.permutation(n)
            c0 = cost(inst, p)
            for i, j in swap_pairs(n):
                assert delta_cost(inst, p, i, j) == cost(inst, swap(p, i, j)) - c0


def test_delta_cost_zero_flow_all_zero(rng):
    n = 6
    inst = QapInstance(n=n, dist=_zero_diag(rng.integers(0, 9, (n, n)).astype(np.int64)),
                       flow=np.zeros((n, n), dtype=np.int64))
    p = rng.permutation(n)
    for i, j in swap_pairs(n):
        assert delta_cost(inst, p, i, j) == 0


def test_delta_cost_n4_all_swaps_of_identity(rng):
    inst = random_symmetric_instance(rng, 4)
    p = identity_perm(4)
    c0 = cost(inst, p)
    expected = [cost(inst, swap(p, i, j)) - c0 for i, j in swap_pairs(4)]
    got = [delta_cost(inst, p, i, j) for i, j in swap_pairs(4)]
    assert got == expected


def test_delta_cost_rejects_equal_indices():
    with pytest.raises(ValueError):
        delta_cost(toy_2x2(), [0, 1], 1, 1)


def test_delta_chain_equals_direct_cost(rng):
    for n in (4, 5, 6):
        inst = random_symmetric_instance(rng, n)
        p = rng.permutation(n)
        c = cost(inst, p)
        for _ in range(50):
            i, j = sorted(rng.choice(n, size=2, replace=False).tolist())
            c += delta_cost(inst, p, i, j)
            p = swap(p, i, j)
            assert c == cost(inst, p)


def test_neighbors_count_and_uniqueness(rng):
    for n in (2, 4, 5, 7):
        p = rng.permutation(n)
        nbrs = neighbors(p)
        assert len(nbrs) == n * (n - 1) // 2
        as_tuples = {tuple(q) for q in nbrs}
        assert len(as_tuples) == len(nbrs)
        assert tuple(p) not in as_tuples
        for q in nbrs:
            assert int(np.count_nonzero(q != p)) == 2


def test_neighbors_n2():
    nbrs = neighbors([0, 1])
    assert len(nbrs) == 1
    assert tuple(nbrs[0]) == (1, 0)


def test_neighbors_n4_identity_are_all_transpositions():
    got = {tuple(q) for q in neighbors(identity_perm(4))}
    expected = set()
    for i, j in itertools.combinations(range(4), 2):
        q = list(range(4))
        q[i], q[j] = q[j], q[i]
        expected.add(tuple(q))
    assert got == expected


def test_rank_identity_and_reverse():
    for n in (2, 3, 5, 8):
        assert perm_rank(identity_perm(n)) == 0
        assert perm_rank(list(reversed(range(n)))) == math.factorial(n) - 1


def test_rank_unrank_round_trip_all_n5():
    for r in range(120):
        assert perm_rank(perm_unrank(r, 5)) == r


def test_rank_matches_lexicographic_enumeration():
    for n in (3, 4, 5):
        for r, p in enumerate(all_perms(n)):
            assert perm_rank(p) == r
            assert tuple(perm_unrank(r, n)) == p


def test_unrank_rejects_out_of_range():
    with pytest.raises(ValueError):
        perm_unrank(-1, 4)
    with pytest.raises(ValueError):
        perm_unrank(24, 4)


def test_rank_bijection_exhaustive():
    for n in (2, 3, 4, 5, 6):
        ranks = {perm_rank(p) for p in all_perms(n)}
        assert ranks == set(range(math.factorial(n)))


def test_cost_invariant_under_simultaneous_relabeling(rng):
    n = 5
    inst = random_symmetric_instance(rng, n)
    for _ in range(10):
        sigma = rng.permutation(n)  # relabel locations and facilities alike
        a2 = inst.dist[np.ix_(sigma, sigma)]
        b2 = inst.flow[np.ix_(sigma, sigma)]
        inst2 = QapInstance(n=n, dist=a2, flow=b2, name="relabeled")
        p = rng.permutation(n)
        inv = np.empty(n, dtype=np.int64)
        inv[sigma] = np.arange(n)
        p2 = inv[p[sigma]]
        assert cost(inst2, p2) == cost(inst, p)


# ---------------------------------------------------------------------------
# the vectorized kernels agree with the scalar contract operations
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_unrank_batch_matches_scalar(n):
    nf = math.factorial(n)
    ranks = np.arange(nf, dtype=np.int64)
    P = unrank_batch(ranks, n)
    for r in range(0, nf, max(1, nf // 60)):
        assert tuple(P[r]) == tuple(perm_unrank(r, n))
    assert np.array_equal(rank_batch(P), ranks)


@pytest.mark.parametrize("n", [4, 5, 6])
def test_delta_columns_match_scalar_delta(rng, n):
    nf = math.factorial(n)
    ranks = np.arange(nf, dtype=np.int64)
    P = unrank_batch(ranks, n)
    pi, pj = pair_arrays(n)
    pairs = swap_pairs(n)
    for make in (random_symmetric_instance, random_asymmetric_instance):
        inst = make(rng, n)
        fast = symmetric_fast_path_ok(inst.dist, inst.flow, n)
        assert fast == (make is random_symmetric_instance)
        D = delta_columns(inst.dist, inst.flow, P, pi, pj, fast)
        for r in range(0, nf, max(1, nf // 40)):
            p = perm_unrank(r, n)
            for c, (i, j) in enumerate(pairs):
                assert D[r, c] == delta_cost(inst, p, i, j)


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_neighbor_rank_columns_match_rank_of_swap(rng, n):
    nf = math.factorial(n)
    sample = np.sort(rng.choice(nf, size=min(nf, 300), replace=False)).astype(np.int64)
    P = unrank_batch(sample, n)
    taus = build_tau_tables(n)
    NR = neighbor_rank_columns(P, sample, n, taus)
    pairs = swap_pairs(n)
    for row in range(0, sample.shape[0], 7):
        p = perm_unrank(int(sample[row]), n)
        for c, (i, j) in enumerate(pairs):
            assert NR[row, c] == perm_rank(swap(p, i, j))
