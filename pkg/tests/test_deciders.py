from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from locald import languages as L
from locald.deciders import (
    DeciderSpec,
    DerandParams,
    algorithm_d,
    ball_decider,
    check_splitter_merge,
    coloring_decider,
    derand_params,
    estimate_tstar,
    has_connected_parts,
    max_running_times,
    mis_decider,
    unique_leader_decider,
)
from locald.errors import ThresholdViolated
from locald.graph import (
    Configuration,
    IdAssignment,
    connected_graphs,
    cycle_graph,
    find_splitters,
    id_assignments,
    path_graph,
)
from locald.runtime import NodeAlgorithm, enumerate_scripts, run


class Instant(NodeAlgorithm):
    def init(self, node_id, node_input, certificate, degree):
        return None

    def step(self, state, rnd, inbox, coins):
        return state, {}, "yes"


def seq(n):
    return IdAssignment.sequential(n)


def test_coloring_decider_outputs():
    path = Configuration(path_graph(4), ("0", "1", "0", "1"))
    assert run(coloring_decider(), path, seq(4)).outputs == ("yes",) * 4
    edge = Configuration(path_graph(2), ("1", "1"))
    assert run(coloring_decider(), edge, seq(2)).outputs == ("no", "no")


def test_mis_decider_outputs():
    assert run(mis_decider(), Configuration(path_graph(1), ("1",)), seq(1)).accepted
    assert not run(mis_decider(), Configuration(path_graph(2), ("1", "1")), seq(2)).accepted
    assert not run(mis_decider(), Configuration(path_graph(2), ("0", "0")), seq(2)).accepted
    # Malformed inputs are a "no", not an exception.
    assert not run(mis_decider(), Configuration(path_graph(2), ("0", "11")), seq(2)).accepted


def test_unique_leader_exact_probabilities():
    p = 0.6
    alg = unique_leader_decider(p)
    for k in range(4):
        config = Configuration(path_graph(3), ("1",) * k + ("0",) * (3 - k))
        leaves = list(enumerate_scripts(lambda tape: run(alg, config, seq(3), coins=tape.for_node)))
        # Each tape choice is one Bernoulli(p) draw; weight leaves accordingly.
        exact = sum(p ** sum(t) * (1 - p) ** (len(t) - sum(t)) for t, r in leaves if r.accepted)
        assert exact == pytest.approx(p**k)
        assert len(leaves) == 2**k


def test_derand_params_examples():
    prm = derand_params(0.9, 0.9)
    assert prm.delta == Fraction(71, 200)
    assert prm.lam == 11
    assert derand_params(1, 1) == DerandParams(Fraction(1, 2), 11)
    with pytest.raises(ThresholdViolated):
        derand_params(0.6, 0.6)


def test_decider_spec():
    assert DeciderSpec(Fraction(9, 10), Fraction(9, 10)).above_threshold
    assert not DeciderSpec(Fraction(3, 5), Fraction(3, 5)).above_threshold
    with pytest.raises(ValueError):
        DeciderSpec(Fraction(0), Fraction(1, 2))


def test_tstar_doubling():
    config = Configuration(path_graph(12), ("0", "1") * 6)
    ts = estimate_tstar(coloring_decider(), config, seq(12), 6)
    assert ts.exact
    assert set(ts.tprime.values()) == {1}
    assert set(ts.tstar.values()) == {8}
    zero = estimate_tstar(Instant(), config, seq(12), 1)
    assert set(zero.tprime.values()) == {1}


def test_max_running_times_exact_for_unique_leader():
    config = Configuration(path_graph(3), ("1", "1", "0"))
    times, exact, runs = max_running_times(unique_leader_decider(0.6), config, seq(3))
    assert exact and runs >= 1 and max(times) >= 0


def test_algorithm_d_tree_examples():
    prm = derand_params(0.9, 0.9)
    alg = algorithm_d(L.TREE, prm, 1)
    assert alg.radius_for(1) == 22
    assert run(alg, Configuration.uniform(path_graph(6)), seq(6)).accepted
    # Far larger than the radius: every ball is a path, so the cycle is accepted.
    small = algorithm_d(L.TREE, DerandParams(Fraction(1, 2), 1), 1)
    cyc = Configuration.uniform(cycle_graph(12))
    assert run(small, cyc, seq(12)).accepted
    assert not L.TREE.member(cyc)


def test_algorithm_d_per_node_tstar():
    alg = algorithm_d(L.COLORING, DerandParams(Fraction(1, 2), 1), {1: 1, 2: 2, 3: 1})
    config = Configuration(path_graph(3), ("0", "1", "0"))
    assert alg.radius_for(2) == 4 and alg.radius_for(1) == 2
    assert run(alg, config, seq(3)).accepted


def test_ball_decider_on_small_graph_sees_everything():
    alg = ball_decider(L.INPEQSIZE, 1)
    config = Configuration.uniform(path_graph(2), "10")
    assert run(alg, config, seq(2)).accepted


def test_inpeqsize_has_violating_splitter():
    found = False
    for n in range(2, 5):
        for g in connected_graphs(n):
            for x in ("1", "10", "11"):
                config = Configuration.uniform(g, x)
                for sp in find_splitters(config, 2):
                    if has_connected_parts(config, sp) and not check_splitter_merge(L.INPEQSIZE, config, seq(n), sp):
                        found = True
    assert found


def test_coloring_splitters_of_member_hold():
    config = Configuration(path_graph(4), ("0", "1", "0", "1"))
    for sp in find_splitters(config, 1):
        if has_connected_parts(config, sp):
            assert check_splitter_merge(L.COLORING, config, seq(4), sp)


# -- properties ----------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=5), st.data())
def test_algorithm_d_is_id_independent(n, data):
    g = data.draw(st.sampled_from(connected_graphs(n)))
    xs = tuple(data.draw(st.sampled_from(("0", "1"))) for _ in range(n))
    config = Configuration(g, xs)
    alg = algorithm_d(L.COLORING, DerandParams(Fraction(1, 2), 1), 1)
    pool = list(id_assignments(n, range(1, n + 3)))
    a = data.draw(st.sampled_from(pool))
    b = data.draw(st.sampled_from(pool))
    assert run(alg, config, a).outputs == run(alg, config, b).outputs


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=6), st.integers(min_value=0, max_value=2**31), st.data())
def test_runs_are_deterministic_per_seed(n, seed, data):
    g = data.draw(st.sampled_from(connected_graphs(n)))
    xs = tuple(data.draw(st.sampled_from(("0", "1"))) for _ in range(n))
    config = Configuration(g, xs)
    alg = unique_leader_decider(0.5)
    assert run(alg, config, seq(n), seed=seed) == run(alg, config, seq(n), seed=seed)
