"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is echoed in the terminal summary.
"""

from __future__ import annotations

import time

import pytest

from conftest import record
from locald import languages as L
from locald.certificates import (
    adversarial_certificate_search,
    double_cover,
    inpeqsize_fooling,
    inpeqsize_verifier,
    integer_certificates,
    tree_certify,
    tree_verifier,
    universal_bpnld_decider,
    universal_certify,
)
from locald.deciders import derand_params
from locald.experiments import (
    derand_check,
    hereditary_report,
    locality_check,
    pool_assignments,
    shipped_locality_cases,
    splitter_sweep,
    threshold_experiment,
)
from locald.graph import Configuration, IdAssignment, connected_graphs, cycle_graph, path_graph, trees
from locald.reductions import check_reduction, containment_reduction, cover_reduction
from locald.runtime import estimate_acceptance, run

pytestmark = pytest.mark.slow


def test_criterion_1_threshold():
    start = time.perf_counter()
    doc = threshold_experiment(0.6, 0.6, (0, 1, 2, 3), trials=100_000, seed=2024)
    elapsed = time.perf_counter() - start
    expected = [1.0, 0.6, 0.36, 0.216]
    got = [row["acceptance"] for row in doc["rows"]]
    ok = all(abs(a - b) <= 0.01 for a, b in zip(got, expected)) and doc["contract_holds"] and elapsed < 30
    record(1, ok, f"acceptance {[round(g, 4) for g in got]} vs {expected}, {elapsed:.1f}s")
    assert ok


def test_criterion_2_derandomization():
    start = time.perf_counter()
    doc = derand_check(L.COLORING, 0.9, 0.9, tstar=8, max_n=8, alphabet=L.COLORS, sim_max_n=4)
    elapsed = time.perf_counter() - start
    ok = doc["agrees"] and elapsed < 300
    record(
        2,
        ok,
        f"{doc['configurations']} configs, {doc['simulated_runs']} simulated runs, "
        f"{doc['mismatches'] + doc['simulated_mismatches']} mismatches, {elapsed:.1f}s",
    )
    assert ok


def test_criterion_3_splitter_merge():
    start = time.perf_counter()
    radius = derand_params(0.9, 0.9).lam * 1
    doc = splitter_sweep(L.COLORING, 6, L.COLORS, radius)
    elapsed = time.perf_counter() - start
    ok = doc["violations"] == 0 and doc["checked"] > 0 and elapsed < 300
    record(3, ok, f"{doc['checked']} checks at radius bound {radius}, {doc['violations']} violations, {elapsed:.1f}s")
    assert ok


def test_criterion_4_tree_scheme():
    start = time.perf_counter()
    verifier = tree_verifier()
    complete = True
    runs = 0
    for n in range(1, 9):
        assignments = pool_assignments(n)
        for g in trees(n):
            config = Configuration.uniform(g)
            for ids in assignments:
                runs += 1
                cert = tree_certify(config, ids)
                complete &= run(verifier, config, ids, cert.values).accepted
    sound = True
    cases = 0
    for n in range(1, 6):
        for g in connected_graphs(n):
            config = Configuration.uniform(g)
            if L.TREE.member(config):
                continue
            cases += 1
            found = adversarial_certificate_search(verifier, config, IdAssignment.sequential(n), integer_certificates(n))
            sound &= found is None
    elapsed = time.perf_counter() - start
    ok = complete and sound and elapsed < 600
    record(4, ok, f"completeness on {runs} runs = {complete}, soundness on {cases} non-trees = {sound}, {elapsed:.1f}s")
    assert ok


def test_criterion_5_universal_decider():
    start = time.perf_counter()
    p = 0.6
    members = [
        (L.UNIQUE_LEADER, Configuration(path_graph(6), ("0", "0", "1", "0", "0", "0"))),
        (L.COLORING, Configuration(cycle_graph(6), ("0", "1") * 3)),
    ]
    points = []
    for lang, config in members:
        ids = IdAssignment.sequential(config.n)
        cert = universal_certify(config, ids)
        est = estimate_acceptance(universal_bpnld_decider(lang, p), config, ids, cert.values, 100_000, 7)
        points.append(est.point)
    # Double cover of a member triangle with each certificate copied to both lifts.
    tri = Configuration(cycle_graph(3), ("11",) * 3)
    ids = IdAssignment.sequential(3)
    cover = double_cover(tri)
    lifted = cover.lift_certificate(universal_certify(tri, ids).values)
    est = estimate_acceptance(
        universal_bpnld_decider(L.INPEQSIZE, p), cover.config, cover.lift_ids(ids), lifted.values, 100_000, 11
    )
    rejection = 1 - est.point
    elapsed = time.perf_counter() - start
    ok = all(abs(x - p) <= 0.01 for x in points) and abs(rejection - 0.64) <= 0.01 and rejection >= 0.63
    ok = ok and elapsed < 120
    record(5, ok, f"member acceptance {[round(x, 4) for x in points]}, double-cover rejection {rejection:.4f}, {elapsed:.1f}s")
    assert ok


def test_criterion_6_inpeqsize_fooling():
    start = time.perf_counter()
    report = inpeqsize_fooling(inpeqsize_verifier(), 1, seed=0)
    elapsed = time.perf_counter() - start
    big = report.nonmember_instance
    ok = (
        report.fooled
        and big.config.n == 6
        and not L.INPEQSIZE.member(big.config)
        and all(o == "yes" for o in big.outputs)
        and elapsed < 10
    )
    record(6, ok, f"6-cycle outputs {set(big.outputs)}, fooled = {report.fooled}, {elapsed:.2f}s")
    assert ok


def test_criterion_7_reductions():
    start = time.perf_counter()
    pool, colors = (1, 2, 3), ("0", "1")
    ok_cover, cx1 = check_reduction(cover_reduction(L.COLORING), 2, pool, colors)
    ok_cont, cx2 = check_reduction(containment_reduction(L.COLORING, 1), 2, pool, colors)
    elapsed = time.perf_counter() - start
    ok = ok_cover and ok_cont and elapsed < 600
    record(7, ok, f"cover = {ok_cover}, containment = {ok_cont}, {elapsed:.2f}s")
    assert ok, (cx1, cx2)


def test_criterion_8_hereditary():
    start = time.perf_counter()
    doc = hereditary_report(("coloring", "unique-leader", "tree", "inpeqsize", "mis"), 5)["languages"]
    elapsed = time.perf_counter() - start
    expected = {"coloring": True, "unique-leader": True, "tree": True, "inpeqsize": False, "mis": False}
    got = {name: entry["hereditary"] for name, entry in doc.items()}
    ok = got == expected and all("counterexample" in doc[n] for n, v in expected.items() if not v)
    # Frozen counterexamples: the first ones the exhaustive checker finds.
    ok = ok and doc["mis"]["counterexample"] == {"edges": [(0, 1)], "inputs": ["0", "1"], "prefix": [0]}
    ok = ok and doc["inpeqsize"]["counterexample"] == {"edges": [(0, 1)], "inputs": ["10", "10"], "prefix": [0]}
    record(8, ok, f"{got}, {elapsed:.1f}s")
    assert ok


def test_criterion_9_locality():
    start = time.perf_counter()
    results = {name: locality_check(case, 1000, 10, seed=9) for name, case in shipped_locality_cases().items()}
    elapsed = time.perf_counter() - start
    bad = {name: r["violations"] for name, r in results.items() if r["violations"]}
    checked = sum(r["checked"] for r in results.values())
    ok = not bad and checked > 0 and elapsed < 60
    record(9, ok, f"{len(results)} algorithms, {checked} surgeries checked, violations {bad or 0}, {elapsed:.1f}s")
    assert ok
