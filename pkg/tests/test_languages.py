import itertools

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from locald import languages as L
from locald.bits import encode_pair
from locald.errors import MalformedInput, Unsupported
from locald.graph import Configuration, Graph, complete_graph, connected_graphs, cycle_graph, path_graph


def test_examples():
    assert L.COLORING.member(Configuration(path_graph(2), ("0", "1")))
    assert not L.UNIQUE_LEADER.member(Configuration(path_graph(2), ("1", "1")))
    assert not L.TREE.member(Configuration.uniform(complete_graph(3)))
    assert L.INPEQSIZE.member(Configuration.uniform(path_graph(3), "11"))


def test_unique_leader_readings_differ_on_zero_leaders():
    zero = Configuration(path_graph(3), ("0", "0", "0"))
    assert L.UNIQUE_LEADER.member(zero)
    assert not L.UNIQUE_LEADER_EXACT.member(zero)


def test_malformed_inputs_raise():
    with pytest.raises(MalformedInput):
        L.MIS.member(Configuration(path_graph(2), ("0", "11")))
    with pytest.raises(MalformedInput):
        L.TREE.member(Configuration(path_graph(2), ("", "1")))


def test_consensus_and_spanning_tree():
    ok = Configuration(path_graph(2), (encode_pair("1", "1"), encode_pair("0", "1")))
    assert L.CONSENSUS.member(ok)
    bad = Configuration(path_graph(2), (encode_pair("0", "1"), encode_pair("0", "1")))
    assert not L.CONSENSUS.member(bad)
    # Node names a, b, c as "1", "10", "11"; everyone points at b.
    names = ("1", "10", "11")
    tree = Configuration(cycle_graph(3), tuple(encode_pair(n, "10") for n in names))
    assert L.SPANNING_TREE.member(tree)
    cyc = Configuration(cycle_graph(3), tuple(encode_pair(n, names[(i + 1) % 3]) for i, n in enumerate(names)))
    assert not L.SPANNING_TREE.member(cyc)


def test_unsupported_membership():
    with pytest.raises(Unsupported):
        L.PLANAR.member(Configuration.uniform(path_graph(2)))


def test_registry_lookup():
    assert L.get("cycle-free") is L.TREE
    assert L.get("#n") is L.INPEQSIZE
    with pytest.raises(KeyError):
        L.get("nope")


@pytest.mark.parametrize(
    "lang, expected",
    [(L.COLORING, True), (L.TREE, True), (L.UNIQUE_LEADER, True), (L.INPEQSIZE, False), (L.MIS, False)],
)
def test_hereditary_cap4(lang, expected):
    ok, cx = L.check_hereditary(lang, 4)
    assert ok is expected
    if not expected:
        assert cx is not None and lang.member(cx.config) and not lang.member(cx.prefix)


def test_inpeqsize_counterexample_shrinks():
    _, cx = L.check_hereditary(L.INPEQSIZE, 4)
    assert cx.prefix.n < cx.config.n
    assert set(cx.prefix.inputs) == set(cx.config.inputs)


def brute_mis(g: Graph, chosen: set[int]) -> bool:
    edges = g.edges()
    independent = not any(a in chosen and b in chosen for a, b in edges)
    if not independent:
        return False
    for v in set(g.nodes) - chosen:
        bigger = chosen | {v}
        if not any(a in bigger and b in bigger for a, b in edges):
            return False
    return True


@pytest.mark.parametrize("n", range(1, 6))
def test_mis_matches_brute_force(n):
    for g in connected_graphs(n):
        for bits in itertools.product("01", repeat=n):
            chosen = {v for v, b in enumerate(bits) if b == "1"}
            assert L.MIS.member(Configuration(g, bits)) == brute_mis(g, chosen)


@settings(max_examples=60)
@given(st.integers(min_value=1, max_value=7), st.data())
def test_tree_is_edge_count(n, data):
    g = data.draw(st.sampled_from(connected_graphs(n)))
    h = nx.Graph(g.edges())
    h.add_nodes_from(range(n))
    assert L.TREE.member(Configuration.uniform(g)) == nx.is_tree(h)


@settings(max_examples=60)
@given(st.integers(min_value=1, max_value=6), st.data())
def test_coloring_batch_matches_scalar(n, data):
    import numpy as np

    g = data.draw(st.sampled_from(connected_graphs(n)))
    rows = data.draw(st.lists(st.lists(st.sampled_from(L.COLORS), min_size=n, max_size=n), min_size=1, max_size=8))
    batch = L.COLORING.member_batch(g, np.array(rows, dtype=object))
    assert list(batch) == [L.COLORING.member(Configuration(g, tuple(r))) for r in rows]
