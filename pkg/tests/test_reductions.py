import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from locald import languages as L
from locald.cover import member_containment, member_cover
from locald.errors import GraphTooLarge, PsiCapExceeded
from locald.graph import Configuration, IdAssignment, connected_graphs, id_assignments, path_graph
from locald.reductions import (
    check_reduction,
    containment_reduction,
    cover_reduction,
    identity_reduction,
    psi,
    psi_value,
    reduce_to_containment,
    reduce_to_cover,
)

EDGE_IDS = IdAssignment((1, 2))


def edge(a, b):
    return Configuration(path_graph(2), (a, b))


def test_psi_examples():
    assert psi(edge("0", "1"), EDGE_IDS).psi == (4, 4)
    assert psi_value(1, "", cap=8) == 2
    with pytest.raises(PsiCapExceeded):
        psi_value(32, "0")
    with pytest.raises(PsiCapExceeded):
        psi_value(1, "10101")


def test_cover_reduction_examples():
    assert member_cover(reduce_to_cover(L.COLORING, edge("0", "1"), EDGE_IDS))
    assert not member_cover(reduce_to_cover(L.COLORING, edge("1", "1"), EDGE_IDS))


def test_containment_reduction_examples():
    assert member_containment(reduce_to_containment(L.COLORING, 1, edge("0", "1"), EDGE_IDS))
    assert not member_containment(reduce_to_containment(L.COLORING, 1, edge("0", "0"), EDGE_IDS))


def test_radius_zero_on_single_nodes():
    for x in L.COLORS:
        config = Configuration(path_graph(1), (x,))
        image = reduce_to_containment(L.COLORING, 0, config, IdAssignment((1,)))
        assert member_containment(image) == L.COLORING.member(config)


def test_size_beyond_cap_is_refused():
    with pytest.raises(PsiCapExceeded):
        reduce_to_cover(L.COLORING, Configuration(path_graph(3), ("0", "1", "0")), IdAssignment.sequential(3), cap=2)


def test_identity_reduction_counterexample():
    ok, cx = check_reduction(identity_reduction(L.TREE, L.COLORING), 2, [1, 2, 3], [""])
    assert not ok
    assert cx.source_member and not cx.target_member


def test_check_reduction_small():
    assert check_reduction(cover_reduction(L.COLORING), 2, [1, 2, 3], ["0", "1"]) == (True, None)
    assert check_reduction(containment_reduction(L.COLORING, 1), 2, [1, 2, 3], ["0", "1"]) == (True, None)
    assert check_reduction(cover_reduction(L.UNIQUE_LEADER), 2, [1, 2], ["0", "1"])[0]
    with pytest.raises(GraphTooLarge):
        check_reduction(cover_reduction(L.COLORING), 9, [1], ["0"])


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=1, max_value=3), st.data())
def test_image_membership_is_id_invariant(n, data):
    g = data.draw(st.sampled_from(connected_graphs(n)))
    config = Configuration(g, tuple(data.draw(st.sampled_from(("0", "1"))) for _ in range(n)))
    pool = list(id_assignments(n, range(1, 4)))
    a, b = data.draw(st.sampled_from(pool)), data.draw(st.sampled_from(pool))
    for reduce, member in ((reduce_to_cover, member_cover), (reduce_to_containment, member_containment)):
        args = (L.COLORING, 1) if reduce is reduce_to_containment else (L.COLORING,)
        assert member(reduce(*args, config, a)) == member(reduce(*args, config, b)) == L.COLORING.member(config)
