"""Streaming engines, pass counting and space accounting."""

import math

import pytest

from auctionmatch.errors import InstanceFormatError
from auctionmatch.graph import BipartiteInstance, Epsilon, generate_random
from auctionmatch.mcbm import run_mcbm
from auctionmatch.mcm import run_mcm
from auctionmatch.mwm import run_mwm
from auctionmatch.graph import scale_and_prune
from auctionmatch.streaming import (
    STREAM_MCBM_SPACE_FACTOR,
    EdgeStream,
    SpaceAccountant,
    stream_mcbm,
    stream_mwm,
)


def test_stream_requires_exactly_one_source():
    with pytest.raises(ValueError):
        EdgeStream()
    with pytest.raises(TypeError):
        EdgeStream.from_instance([(0, 0, 1)])


def test_stream_counts_passes_and_replays_identically():
    inst = generate_random(6, 6, 0.5, w_range=(1, 9), seed=0)
    stream = EdgeStream.from_instance(inst)
    assert stream.passes == 0
    first = list(stream.traverse())
    second = list(stream.traverse())
    assert stream.passes == 2
    assert first == second == list(inst.edges)


def test_stream_file_roundtrip(tmp_path):
    from auctionmatch.graph import save_instance

    inst = generate_random(
        5, 5, 0.6, w_range=(1, 4), b_l_range=(1, 2), seed=1)
    path = tmp_path / "inst.gr"
    save_instance(inst, path)
    stream = EdgeStream.from_path(path)
    edges = list(stream.traverse())
    assert edges == list(inst.edges)
    assert stream.n_l == inst.n_l
    assert stream.b_l == inst.b_l
    assert stream.b_r == inst.b_r


@pytest.mark.parametrize("text,fragment", [
    ("e 1 1 1\n", "edge before"),
    ("b l 1 2\n", "capacity before"),
    ("p bm 1 1\n", "malformed problem"),
    ("p bm 1 1 1\nq 0\n", "unknown record"),
    ("p bm 1 1 1\ne 1 1\n", "malformed edge"),
    ("p bm 2 2 2\ne 1 1 1\n", "declares"),
])
def test_stream_file_errors(tmp_path, text, fragment):
    path = tmp_path / "bad.gr"
    path.write_text(text)
    stream = EdgeStream.from_path(path)
    with pytest.raises(InstanceFormatError, match=fragment):
        list(stream.traverse())


def test_space_accountant_tracks_peak_by_tag():
    acct = SpaceAccountant()
    acct.alloc(10, "a")
    acct.alloc(5, "b")
    acct.free(10, "a")
    acct.alloc(2, "b")
    assert acct.peak == 15
    assert acct.current == 7
    assert acct.tags == {"a": 0, "b": 7}


def test_stream_mwm_single_edge():
    inst = BipartiteInstance.build(1, 1, [(0, 0, 7)])
    res, tr = stream_mwm(EdgeStream.from_instance(inst), Epsilon(2))
    assert res.value == 7
    assert res.pairs == ((0, 0),)
    assert tr.rounds_executed == 1
    assert tr.passes == 1 + 2 * tr.rounds_executed == 3
    assert tr.peak_words > 0


def test_stream_mwm_rejects_empty():
    inst = BipartiteInstance.build(2, 2, [])
    with pytest.raises(ValueError):
        stream_mwm(EdgeStream.from_instance(inst), Epsilon(2))


@pytest.mark.parametrize("seed", range(6))
def test_stream_mwm_mirrors_memory_stream_kernel(seed):
    inst = generate_random(10, 10, 0.4, w_range=(1, 40), seed=seed)
    eps = Epsilon(4)
    mem_res, mem_tr = run_mwm(scale_and_prune(inst, eps), eps, kernel="stream")
    str_res, str_tr = stream_mwm(EdgeStream.from_instance(inst), eps,
                                 audit=True)
    assert str_res.value == mem_res.value
    assert str_res.pairs == mem_res.pairs
    assert str_tr.rounds_executed == mem_tr.rounds_executed
    assert str_tr.passes == 1 + 2 * str_tr.rounds_executed


def test_stream_mwm_space_grows_linearly():
    peaks = []
    for n in (64, 128):
        inst = generate_random(n, n, 8 / n, w_range=(1, 16), seed=0)
        _, tr = stream_mwm(EdgeStream.from_instance(inst), Epsilon(4))
        peaks.append(tr.peak_words)
    assert peaks[1] <= 2.5 * peaks[0]


def test_stream_mcbm_star():
    inst = BipartiteInstance.build(
        1, 4, [(0, j, 1) for j in range(4)], b_l=[2], b_r=[1] * 4)
    res, tr = stream_mcbm(EdgeStream.from_instance(inst), Epsilon(4),
                          audit=True)
    assert res.cardinality == 2
    assert res.bidder_usage == (2,)
    assert tr.passes == 1 + 2 * tr.rounds_executed == 3
    budget = STREAM_MCBM_SPACE_FACTOR * (sum(inst.b_l) + inst.n_r)
    assert tr.peak_words <= budget


@pytest.mark.parametrize("seed", range(6))
def test_stream_mcbm_mirrors_memory_stream_kernel(seed):
    inst = generate_random(
        8, 8, 0.4, b_l_range=(1, 3), b_r_range=(1, 3), seed=seed)
    eps = Epsilon(4)
    mem_res, mem_tr = run_mcbm(inst, eps, kernel="stream")
    str_res, str_tr = stream_mcbm(EdgeStream.from_instance(inst), eps)
    assert str_res.cardinality == mem_res.cardinality
    assert str_res.pairs == mem_res.pairs
    assert str_tr.rounds_executed == mem_tr.rounds_executed
    assert str_tr.passes == 1 + 2 * str_tr.rounds_executed


@pytest.mark.parametrize("seed", range(4))
def test_stream_mcbm_unit_caps_degenerate(seed):
    inst = generate_random(7, 7, 0.4, seed=seed)
    res, tr = stream_mcbm(EdgeStream.from_instance(inst), Epsilon(4),
                          audit=True)
    mem_res, _ = run_mcbm(inst, Epsilon(4), kernel="stream")
    assert res.cardinality == mem_res.cardinality
    assert res.valid
    budget = STREAM_MCBM_SPACE_FACTOR * (sum(inst.b_l) + inst.n_r)
    assert tr.peak_words <= budget


def test_blackboard_single_edge_weighted():
    inst = BipartiteInstance.build(1, 1, [(0, 0, 1)])
    eps = Epsilon(2)
    _, tr = run_mwm(scale_and_prune(inst, eps), eps, kernel="rand")
    bb = tr.blackboard
    assert bb.proposal_rounds == 1
    assert bb.price_announcements == 1
    assert bb.rounds == 3
    assert bb.price_bits_each == 1


def test_blackboard_round_mean_tracks_log_bound():
    # complete 16x16 unit graph: one auction round, proposal subrounds
    # land within a factor 4 of 4*log2(n) either way
    inst = BipartiteInstance.build(
        16, 16, [(i, j, 1) for i in range(16) for j in range(16)])
    totals = []
    for seed in range(50):
        _, tr = run_mcm(inst, Epsilon(4), kernel="rand", seed=seed)
        assert tr.rounds_executed == 1
        totals.append(tr.blackboard.rounds)
    mean = sum(totals) / len(totals)
    assert round(mean, 2) == 5.42
    base = 4 * math.ceil(math.log2(inst.n_l + inst.n_r))
    assert base <= 4 * mean
    assert mean <= 4 * base
