import csv
import io

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from locald import languages as L
from locald.deciders import coloring_decider, mis_decider
from locald.errors import RadiusTooLarge
from locald.experiments import (
    ExperimentConfig,
    derand_check,
    hereditary_report,
    leader_instance,
    locality_check,
    make_decider,
    oracle_sweep,
    path_cycle_fooling,
    pool_assignments,
    provenance,
    report_to_csv,
    run_experiment,
    shipped_locality_cases,
    splitter_sweep,
    threshold_experiment,
)


def test_leader_instance():
    config = leader_instance(2, 4)
    assert config.inputs == ("1", "1", "0", "0")
    with pytest.raises(ValueError):
        leader_instance(5, 4)


def test_threshold_below_and_above():
    doc = threshold_experiment(0.6, 0.6, (0, 1, 2), trials=20_000, seed=3)
    assert doc["rows"][0]["acceptance"] == 1.0
    assert doc["below_threshold"] and doc["contract_holds"]
    high = threshold_experiment(0.9, 0.9, (2,), trials=20_000, seed=3)
    row = high["rows"][0]
    assert abs(row["rejection"] - 0.19) < 0.015
    assert not high["contract_holds"] and not high["below_threshold"]


def test_path_cycle_fooling_with_small_algorithm_d():
    decider = make_decider("algorithm-d", {"lang": "tree", "lam": 1, "delta": "1/2", "tstar": 1})
    report = path_cycle_fooling(decider, 2, 8)
    assert report.fooled
    assert all(report.details[k] for k in ("views_match", "outputs_match", "p1_middle_yes", "p2_ends_yes"))
    assert not L.TREE.member(report.nonmember_instance.config)
    with pytest.raises(RadiusTooLarge):
        path_cycle_fooling(decider, 8, 8)


def test_pool_assignments_sizes():
    assert len(pool_assignments(2)) == 6
    assert len(pool_assignments(3)) == 6
    assert len(pool_assignments(4)) == 24
    assert len(pool_assignments(7)) == 3


def test_make_decider_registry():
    assert make_decider("coloring").name == coloring_decider().name
    with pytest.raises(KeyError):
        make_decider("nope")


def test_small_derand_check():
    doc = derand_check(max_n=4, sim_max_n=2)
    assert doc["agrees"] and doc["lambda"] == 11 and doc["radius"] == 176


def test_splitter_sweep_radius_matters():
    assert splitter_sweep(L.COLORING, 4, ("0", "1"), 2)["violations"] == 0
    assert splitter_sweep(L.COLORING, 4, ("0", "1"), 1)["violations"] > 0
    doc = splitter_sweep(L.INPEQSIZE, 3, ("1", "10", "11"), 2)
    assert doc["violations"] > 0 and doc["first_violation"] is not None


def test_oracle_sweep_mis():
    doc = oracle_sweep(mis_decider(), L.MIS, 4, ("0", "1"), pool_assignments)
    assert doc["mismatches"] == 0 and doc["runs"] > 0


def test_hereditary_report_shape():
    doc = hereditary_report(("coloring", "mis"), 3)
    assert doc["languages"]["coloring"] == {"hereditary": True}
    assert doc["languages"]["mis"]["counterexample"]["prefix"] == [0]


def test_provenance_is_stable():
    a = ExperimentConfig("threshold", {"p": 0.6, "q": 0.6}, 1, 10)
    b = ExperimentConfig("threshold", {"q": 0.6, "p": 0.6}, 1, 10)
    assert provenance(a)["config_hash"] == provenance(b)["config_hash"]
    assert provenance(a)["config_hash"] != provenance(ExperimentConfig("threshold", {}, 2, 10))["config_hash"]
    with pytest.raises(ValueError):
        ExperimentConfig("bogus", {}, 0, 1)


@pytest.mark.parametrize(
    "kind, params",
    [
        ("estimate", {"leaders": 1, "p": 0.5}),
        ("fool-ld", {"t": 1, "n": 4}),
        ("fool-nld", {"t": 1}),
        ("reduce-check", {"node_cap": 1}),
        ("hereditary-check", {"node_cap": 3, "languages": ["tree"]}),
        ("derand-check", {"max_n": 3, "sim_max_n": 1}),
    ],
)
def test_run_experiment_kinds(kind, params):
    report = run_experiment(ExperimentConfig(kind, params, 0, 200))
    assert report["provenance"]["config"]["kind"] == kind
    assert report["result"]


def test_report_to_csv_rows():
    report = run_experiment(ExperimentConfig("threshold", {"leaders": [0, 1]}, 0, 500))
    rows = list(csv.DictReader(io.StringIO(report_to_csv(report))))
    assert [r["leaders"] for r in rows] == ["0", "1"]


def test_shipped_cases_cover_every_decider():
    assert set(shipped_locality_cases()) >= {
        "coloring",
        "mis",
        "unique-leader",
        "algorithm-d",
        "tree-verifier",
        "inpeqsize-verifier",
        "universal",
        "containment-verifier",
    }


@settings(max_examples=10, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_locality_property(seed):
    cases = shipped_locality_cases()
    for name in ("coloring", "mis", "ball-tree", "tree-verifier", "algorithm-d"):
        assert locality_check(cases[name], 20, 8, seed)["violations"] == 0


def test_fooling_report_invariant():
    from locald.graph import Configuration, IdAssignment, path_graph
    from locald.reports import FoolingReport, Instance

    config = Configuration(path_graph(2), ("1", "1"))
    rejected = Instance(config, IdAssignment.sequential(2), ("yes", "no"))
    with pytest.raises(ValueError):
        FoolingReport("demo", rejected, rejected, fooled=True)
    assert FoolingReport("demo", rejected, rejected).to_json()["nonmember_instance"]["verdict"] == "reject"
