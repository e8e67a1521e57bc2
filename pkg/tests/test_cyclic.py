import random
from fractions import Fraction as F
from math import factorial

import pytest

from conftest import random_rational_params
from liquidbin.combinatorics import DCGraph, connected_component_of_one, enumerate_dc
from liquidbin.cyclic import (
    ChainConstraint,
    CyclicOrder,
    DisconnectedRegionError,
    WallTieError,
    all_cyclic_orders,
    circular_extensions,
    conjecture_probe,
    f_map,
    jump_order,
    sample_params,
    zprime_chains,
)
from liquidbin.params import Params
from liquidbin.regions import classify

FIG1 = Params((F(3, 2), F(5, 2)), (F(1, 2), F(3, 2)))
K = DCGraph.complete
L = DCGraph.line

# fiber sizes of the line graphs follow the zigzag numbers 1, 1, 2, 5, 16, 61
ZIGZAG = {2: 1, 3: 1, 4: 2, 5: 5, 6: 16, 7: 61}


def test_cyclic_order_canonical_rotation():
    assert CyclicOrder((3, 1, 2)).order == (1, 2, 3)
    assert CyclicOrder((2, 3, 1)).order == (1, 2, 3)
    with pytest.raises(ValueError):
        CyclicOrder((1, 2, 2))
    with pytest.raises(ValueError):
        CyclicOrder((2, 3, 4))


def test_triple_membership():
    z = CyclicOrder((1, 3, 2))
    assert z.contains(1, 3, 2)
    assert z.contains(3, 2, 1)
    assert not z.contains(1, 2, 3)
    assert z.is_chain((1,)) and z.is_chain((1, 2))


def test_chain_constraint_validation():
    with pytest.raises(ValueError):
        ChainConstraint((1, 2))
    with pytest.raises(ValueError):
        ChainConstraint((1, 2, 1))


def test_f_map_examples():
    assert f_map(CyclicOrder((1, 2, 3))) == K(3)
    assert f_map(CyclicOrder((1, 3, 2))) == L(3)
    assert f_map(CyclicOrder((1, 2))) == K(2)
    assert f_map(CyclicOrder((1,))) == DCGraph(1)


def test_f_map_output_is_connected_and_closed():
    for n in range(2, 6):
        for z in all_cyclic_orders(n):
            g = f_map(z)  # DCGraph constructor validates closure
            assert connected_component_of_one(g).n == n


def test_zprime_chain_examples():
    assert [c.entries for c in zprime_chains(K(3))] == [(1, 2, 3)]
    assert [c.entries for c in zprime_chains(L(3))] == [(2, 1, 3)]
    assert zprime_chains(K(2)) == ()
    with pytest.raises(DisconnectedRegionError):
        zprime_chains(DCGraph.empty(3))


def test_realized_orders_satisfy_chain_constraints():
    rng = random.Random(3)
    for _ in range(30):
        params = random_rational_params(rng, rng.randint(2, 4))
        report = classify(params)
        if connected_component_of_one(report.graph).n != report.graph.n:
            continue
        try:
            order = jump_order(params, graph=report.graph, z=report.z)
        except WallTieError:
            continue
        for c in zprime_chains(report.graph):
            assert order.is_chain(c.entries)


def test_fiber_partition():
    for n in range(2, 8):
        connected = [g for g in enumerate_dc(n) if connected_component_of_one(g).n == n]
        total = sum(len(circular_extensions(g)) for g in connected)
        assert total == factorial(n - 1)


def test_complete_graph_has_unique_extension():
    for n in range(2, 8):
        exts = circular_extensions(K(n))
        assert len(exts) == 1
        assert exts[0].order == tuple(range(1, n + 1))


def test_line_graph_zigzag_counts():
    for n, expected in ZIGZAG.items():
        assert len(circular_extensions(L(n))) == expected


def test_extension_guard_on_large_n():
    with pytest.raises(ValueError):
        circular_extensions(L(10))


def test_dual_filters_agree():
    # circular_extensions raises internally if the chain filter and the
    # f_map fiber ever part ways; sweep every connected graph
    for n in range(2, 7):
        for g in enumerate_dc(n):
            if connected_component_of_one(g).n == n:
                circular_extensions(g)


def test_jump_order_examples():
    assert jump_order(FIG1).order == (1, 2)
    p4 = Params((F(4), F(5), F(6), F(7)), (F(1), F(1), F(1), F(1)))
    assert classify(p4).graph == K(4)
    assert jump_order(p4).order == (1, 2, 3, 4)


def test_jump_order_methods_agree():
    rng = random.Random(5)
    agreed = 0
    for _ in range(40):
        params = random_rational_params(rng, rng.randint(2, 4))
        report = classify(params)
        if connected_component_of_one(report.graph).n != report.graph.n:
            continue
        try:
            sim = jump_order(params, graph=report.graph, z=report.z)
            fast = jump_order(params, method="phases", graph=report.graph, z=report.z)
        except WallTieError:
            continue
        assert sim == fast
        agreed += 1
    assert agreed >= 20


def test_jump_order_f_consistency():
    rng = random.Random(7)
    hits = 0
    for _ in range(60):
        params = random_rational_params(rng, rng.randint(2, 4))
        report = classify(params)
        if connected_component_of_one(report.graph).n != report.graph.n:
            continue
        try:
            order = jump_order(params, graph=report.graph, z=report.z)
        except WallTieError:
            continue
        assert f_map(order) == report.graph
        hits += 1
    assert hits >= 25


def test_jump_order_rejects_disconnected():
    # a2 far beyond a1: the stationary graph splits
    params = Params((F(1), F(50)), (F(1), F(1)))
    report = classify(params)
    assert report.graph == DCGraph.empty(2)
    with pytest.raises(DisconnectedRegionError) as err:
        jump_order(params)
    assert err.value.graph == DCGraph.empty(2)


def test_jump_order_wall_tie():
    with pytest.raises(WallTieError):
        jump_order(Params((F(1), F(2), F(3)), (F(1), F(1), F(1))))


def test_probe_coverage_small():
    for g in (K(2), K(3), L(3)):
        rep = conjecture_probe(g, budget=20000, seed=7)
        assert rep.covered
        assert rep.missing == ()
        assert set(rep.realized) == set(rep.extensions)
        assert rep.hits >= len(rep.extensions)
    rep = conjecture_probe(K(3), budget=20000, seed=7)
    assert rep.samples <= 20000 and rep.seed == 7
    assert rep.rng == "numpy-pcg64"


def test_probe_determinism():
    a = conjecture_probe(L(3), budget=3000, seed=13)
    b = conjecture_probe(L(3), budget=3000, seed=13)
    assert a.samples == b.samples and a.hits == b.hits and a.counts == b.counts


def test_probe_reports_missing_without_refutation():
    rep = conjecture_probe(L(4), budget=1, seed=1)
    assert not rep.covered
    assert set(rep.missing) | set(rep.realized) == set(rep.extensions)


def test_sample_params_ranges():
    import numpy as np

    rng = np.random.default_rng(0)
    for _ in range(50):
        params = sample_params(rng, 4)
        assert all(1e-2 <= d <= 1e2 for d in params.d)
        assert all(1e-2 <= p <= 1e2 for p in params.p)
