"""Instance model, file format, generation, and scaling."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from auctionmatch.errors import InstanceFormatError
from auctionmatch.graph import (
    BipartiteInstance,
    Epsilon,
    ceil_log,
    dumps_instance,
    generate_random,
    load_instance,
    loads_instance,
    save_instance,
    scale_and_prune,
)


def test_epsilon_accepts_unit_fractions():
    assert Epsilon(2).value == pytest.approx(0.5)
    assert str(Epsilon(8)) == "1/8"
    assert Epsilon.parse("1/16").k == 16


@pytest.mark.parametrize("bad", ["2/4", "1/1", "0.25", "1/x", "1", "1/-2"])
def test_epsilon_rejects_non_unit_fractions(bad):
    with pytest.raises(ValueError):
        Epsilon.parse(bad)


def test_epsilon_rejects_small_k():
    with pytest.raises(ValueError):
        Epsilon(1)


def test_ceil_log_exact_cases():
    assert ceil_log(2, 1) == 0
    assert ceil_log(2, 2) == 1
    assert ceil_log(2, 3) == 2
    assert ceil_log(4, 16) == 2
    assert ceil_log(4, 17) == 3
    assert ceil_log(8, 1000, 10) == 3  # 8**2 = 64 < 100 <= 512


def test_instance_rejects_bad_shapes():
    with pytest.raises(ValueError):
        BipartiteInstance.build(0, 1, [])
    with pytest.raises(ValueError):
        BipartiteInstance.build(1, 1, [(0, 0, 0)])
    with pytest.raises(ValueError):
        BipartiteInstance.build(1, 1, [(0, 0, 1), (0, 0, 2)])
    with pytest.raises(ValueError):
        BipartiteInstance.build(1, 2, [(0, 2, 1)])
    with pytest.raises(ValueError):
        BipartiteInstance.build(1, 1, [(0, 0, 1)], b_l=[2])


def test_roundtrip_preserves_edge_order():
    inst = BipartiteInstance.build(
        3, 2, [(2, 0, 5), (0, 1, 1), (1, 0, 7)], b_l=[1, 2, 1], b_r=[2, 1])
    again = loads_instance(dumps_instance(inst))
    assert again == inst
    assert again.edges == inst.edges


def test_load_save_roundtrip(tmp_path):
    inst = generate_random(6, 5, 0.5, w_range=(1, 30), seed=2)
    path = tmp_path / "g.gr"
    save_instance(inst, path)
    assert load_instance(path) == inst


def test_format_errors_carry_line_numbers():
    with pytest.raises(InstanceFormatError, match="line 1"):
        loads_instance("q bm 1 1 0\n")
    with pytest.raises(InstanceFormatError, match="line 2"):
        loads_instance("p bm 1 1 1\ne 1 1\n")
    with pytest.raises(InstanceFormatError, match="declares"):
        loads_instance("p bm 1 1 2\ne 1 1 1\n")


def test_generator_is_deterministic_and_in_range():
    a = generate_random(8, 7, 0.4, w_range=(3, 9), b_l_range=(1, 3), seed=5)
    b = generate_random(8, 7, 0.4, w_range=(3, 9), b_l_range=(1, 3), seed=5)
    c = generate_random(8, 7, 0.4, w_range=(3, 9), b_l_range=(1, 3), seed=6)
    assert a == b
    assert a != c
    assert all(3 <= w <= 9 for _, _, w in a.edges)
    assert all(1 <= cap <= 3 for cap in a.b_l)
    assert all(cap == 1 for cap in a.b_r)


def test_scale_keeps_unit_weights_whole():
    inst = BipartiteInstance.build(2, 2, [(0, 0, 1), (1, 1, 1)])
    sg = scale_and_prune(inst, Epsilon(4))
    assert sg.w_max == 1
    assert sg.m == 2
    assert sg.pruned_count == 0
    assert sg.bucket_count == 0


def test_prune_threshold_branches_on_edge_count_vs_spread():
    # m * w_min <= w_max: exponent from the edge count, m=2 -> t=2
    inst = BipartiteInstance.build(
        2, 2, [(0, 0, 1000), (1, 1, 1)])
    sg = scale_and_prune(inst, Epsilon(2))
    assert sg.prune_exponent == 2
    assert sg.m == 1  # 1 * 2**2 < 1000: the light edge goes

    # m * w_min > w_max: exponent from the weight spread, t = ceil_log(9/5)+1
    dense = BipartiteInstance.build(
        4, 4, [(0, 0, 5), (1, 1, 5), (2, 2, 5), (3, 3, 9)])
    sg2 = scale_and_prune(dense, Epsilon(2))
    assert sg2.prune_exponent == 2
    assert sg2.m == 4  # 5 * 4 >= 9: everything clears


def test_prune_drops_tiny_edges():
    edges = [(0, 0, 10**6)] + [(1, k + 1, 1) for k in range(3)]
    inst = BipartiteInstance.build(2, 4, edges)
    sg = scale_and_prune(inst, Epsilon(2))
    # m=4, m*w_min=4 <= w_max: t = ceil_log(2, 4) + 1 = 3; 1*8 < 10**6 pruned
    assert sg.prune_exponent == 3
    assert sg.m == 1
    assert sg.pruned_count == 3


def test_scale_is_idempotent_with_carried_exponent():
    inst = generate_random(10, 10, 0.4, w_range=(1, 10**4), seed=1)
    sg = scale_and_prune(inst, Epsilon(2))
    survivors = BipartiteInstance.build(
        inst.n_l, inst.n_r, sg.edges, b_l=inst.b_l, b_r=inst.b_r)
    again = scale_and_prune(survivors, Epsilon(2),
                            threshold_exponent=sg.prune_exponent)
    assert again.edges == sg.edges
    assert again.pruned_count == 0


def test_scale_rejects_empty():
    inst = BipartiteInstance.build(2, 2, [])
    with pytest.raises(ValueError):
        scale_and_prune(inst, Epsilon(2))


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(2, 9),
    density=st.floats(0.1, 0.9),
    wmax=st.integers(1, 10**5),
    k=st.sampled_from([2, 4, 8]),
    seed=st.integers(0, 10**6),
)
def test_survivors_always_clear_the_threshold(n, density, wmax, k, seed):
    try:
        inst = generate_random(n, n, density, w_range=(1, wmax), seed=seed)
    except ValueError:
        return  # zero-edge draw
    sg = scale_and_prune(inst, Epsilon(k))
    power = k ** sg.prune_exponent
    assert all(w * power >= sg.w_max for _, _, w in sg.edges)
    assert sg.pruned_count == inst.m - sg.m
    survivor_set = set(sg.edges)
    dropped = [e for e in inst.edges if e not in survivor_set]
    assert all(w * power < sg.w_max for _, _, w in dropped)
