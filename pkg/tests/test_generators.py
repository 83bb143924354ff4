"""Instance generator distributions, determinism, and file round trips."""

import numpy as np
import pytest
from scipy import stats as scipy_stats

from qaplon import (GeneratorParams, ParseError, QapInstance, cost, generate,
                    read_instance, write_instance)


def test_same_seed_bit_identical():
    p = GeneratorParams(n=7, seed=123, instance_class="uniform")
    a = generate(p)
    b = generate(p)
    assert np.array_equal(a.dist, b.dist)
    assert np.array_equal(a.flow, b.flow)
    assert a.name == b.name


def test_param_validation():
    with pytest.raises(ValueError):
        GeneratorParams(n=1, seed=0, instance_class="uniform")
    with pytest.raises(ValueError):
        GeneratorParams(n=5, seed=0, instance_class="weird")
    with pytest.raises(ValueError):
        GeneratorParams(n=5, seed=0, instance_class="uniform", flow_max=0)
    with pytest.raises(ValueError):
        GeneratorParams(n=5, seed=0, instance_class="real-like",
                        reallike_sparsity=1.5)


def test_uniform_flow_histogram_is_flat():
    # pooled off-diagonal entries over 30 instances; chi-square against uniform
    flow_max = 50
    values = []
    for seed in range(30):
        inst = generate(GeneratorParams(n=9, seed=seed, instance_class="uniform",
                                        flow_max=flow_max))
        iu = np.triu_indices(9, k=1)
        values.extend(inst.flow[iu].tolist())
    counts = np.bincount(np.array(values), minlength=flow_max + 1)[1:]
    assert counts.sum() == 30 * 36
    _, p = scipy_stats.chisquare(counts)
    assert p > 0.01


def test_reallike_flows_have_zeros_and_span_two_orders():
    inst = generate(GeneratorParams(n=11, seed=5, instance_class="real-like",
                                    reallike_amplitude=3.0))
    iu = np.triu_indices(11, k=1)
    vals = inst.flow[iu]
    nonzero = vals[vals > 0]
    assert np.count_nonzero(vals == 0) > 0
    assert nonzero.size > 0
    assert nonzero.max() / max(nonzero.min(), 1) >= 100


def test_matrices_symmetric_zero_diagonal():
    for cls in ("uniform", "real-like"):
        inst = generate(GeneratorParams(n=8, seed=9, instance_class=cls))
        for m in (inst.dist, inst.flow):
            assert np.array_equal(m, m.T)
            assert np.all(np.diag(m) == 0)


def test_distance_triangle_inequality_up_to_rounding():
    # rounding each entry by at most 0.5 allows a slack of 1 on integer sums
    for cls in ("uniform", "real-like"):
        inst = generate(GeneratorParams(n=10, seed=3, instance_class=cls))
        d = inst.dist
        n = inst.n
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    assert d[i, j] <= d[i, k] + d[k, j] + 1


def test_distinct_seeds_give_distinct_instances():
    seen = set()
    for seed in range(100):
        inst = generate(GeneratorParams(n=6, seed=seed, instance_class="uniform"))
        seen.add(inst.dist.tobytes() + inst.flow.tobytes())
    assert len(seen) == 100


def test_write_read_round_trip(tmp_path):
    for cls in ("uniform", "real-like"):
        inst = generate(GeneratorParams(n=7, seed=11, instance_class=cls))
        path = tmp_path / f"{inst.name}.dat"
        write_instance(inst, path)
        back = read_instance(path)
        assert back.n == inst.n
        assert np.array_equal(back.dist, inst.dist)
        assert np.array_equal(back.flow, inst.flow)
        assert back.is_integer


def test_float_round_trip(tmp_path):
    inst = QapInstance(
        n=2,
        dist=np.array([[0.0, 1.25], [1.25, 0.0]]),
        flow=np.array([[0.0, 0.1], [0.1, 0.0]]),
        name="floaty",
    )
    path = tmp_path / "floaty.dat"
    write_instance(inst, path)
    back = read_instance(path)
    assert not back.is_integer
    assert np.array_equal(back.dist, inst.dist)
    assert np.array_equal(back.flow, inst.flow)


def test_short_file_reports_shortfall(tmp_path):
    path = tmp_path / "short.dat"
    path.write_text("3\n0 1 2 1 0 3 2 3\n")  # 8 of 9 distance entries, no flow
    with pytest.raises(ParseError, match="found 8"):
        read_instance(path)


def test_bad_token_reports_line_and_column(tmp_path):
    path = tmp_path / "bad.dat"
    path.write_text("2\n0 1\n1 0\n0 x\n3 0\n")
    with pytest.raises(ParseError, match="line 4"):
        read_instance(path)


def test_trailing_garbage_rejected(tmp_path):
    path = tmp_path / "long.dat"
    path.write_text("2\n0 1\n1 0\n0 3\n3 0\n99\n")
    with pytest.raises(ParseError, match="trailing"):
        read_instance(path)


def test_hand_written_2x2_has_cost_6(tmp_path):
    path = tmp_path / "hand.dat"
    path.write_text("2\n\n0 1\n1 0\n\n0 3\n3 0\n")
    inst = read_instance(path)
    assert cost(inst, [0, 1]) == 6


def test_reader_warns_on_nonzero_diagonal(tmp_path):
    path = tmp_path / "diag.dat"
    path.write_text("2\n5 1\n1 0\n0 3\n3 0\n")
    with pytest.warns(UserWarning, match="diagonal"):
        read_instance(path)
