"""Experiment drivers: threshold runs, fooling constructions and oracle sweeps.

Every driver returns a plain JSON-able dict (or a :class:`FoolingReport`);
:func:`run_experiment` wraps them with provenance so a report can be
re-run exactly.
"""

from __future__ import annotations

import csv
import io
import itertools
import random
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from . import __version__
from . import languages as L
from .certificates import (
    containment_verifier,
    inpeqsize_fooling,
    inpeqsize_verifier,
    tree_verifier,
    universal_bpnld_decider,
)
from .deciders import (
    DerandParams,
    algorithm_d,
    ball_decider,
    ball_outputs_batch,
    coloring_decider,
    derand_params,
    has_connected_parts,
    mis_decider,
    unique_leader_decider,
)
from .errors import GraphError, MalformedInput, RadiusTooLarge
from .graph import (
    Configuration,
    Graph,
    IdAssignment,
    ball,
    connected_graphs,
    cycle_graph,
    find_splitters,
    id_assignments,
    path_graph,
    views_isomorphic,
)
from .jsonio import content_hash
from .reductions import check_reduction, containment_reduction, cover_reduction
from .reports import FoolingReport, Instance
from .runtime import YES, NodeAlgorithm, estimate_acceptance, run

KINDS = ("estimate", "threshold", "fool-ld", "fool-nld", "reduce-check", "hereditary-check", "derand-check")


# -- decider registry ----------------------------------------------------------


def _fraction(x: Any) -> Fraction:
    return Fraction(str(x)).limit_denominator(10**9)


def make_decider(name: str, params: Mapping[str, Any] | None = None) -> NodeAlgorithm:
    """Build a shipped algorithm from its name and a parameter object.

    ``algorithm-d`` takes ``lang``, ``tstar`` and either ``p``/``q`` or an
    explicit ``lam`` (useful for small-radius demonstrations).
    """
    params = dict(params or {})
    lang = L.get(params["lang"]) if "lang" in params else None
    if name == "coloring":
        return coloring_decider()
    if name == "mis":
        return mis_decider()
    if name == "unique-leader":
        return unique_leader_decider(float(params.get("p", 0.6)))
    if name == "ball":
        return ball_decider(lang or L.COLORING, int(params.get("radius", 1)))
    if name == "algorithm-d":
        if "lam" in params:
            dp = DerandParams(_fraction(params.get("delta", "0.5")), int(params["lam"]))
        else:
            dp = derand_params(_fraction(params.get("p", 1)), _fraction(params.get("q", 1)))
        return algorithm_d(lang or L.COLORING, dp, int(params.get("tstar", 1)))
    if name == "tree-verifier":
        return tree_verifier()
    if name == "universal":
        return universal_bpnld_decider(lang or L.UNIQUE_LEADER, float(params.get("p", 0.6)))
    if name == "containment-verifier":
        return containment_verifier()
    if name == "inpeqsize-verifier":
        return inpeqsize_verifier()
    raise KeyError(f"unknown decider {name!r}; known: {', '.join(DECIDERS)}")


DECIDERS = (
    "coloring",
    "mis",
    "unique-leader",
    "ball",
    "algorithm-d",
    "tree-verifier",
    "universal",
    "containment-verifier",
    "inpeqsize-verifier",
)


# -- configuration and provenance ----------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    parameters: dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    trials: int = 100_000

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}; known: {', '.join(KINDS)}")
        if self.trials < 1:
            raise ValueError("trials must be positive")

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind, "parameters": self.parameters, "seed": self.seed, "trials": self.trials}


def provenance(config: ExperimentConfig) -> dict[str, Any]:
    doc = config.to_json()
    return {"config": doc, "config_hash": content_hash(doc), "version": __version__}


# -- threshold -----------------------------------------------------------------


def leader_instance(k: int, n: int) -> Configuration:
    """Path on ``n`` nodes whose first ``k`` nodes are leaders."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    return Configuration(path_graph(n), ("1",) * k + ("0",) * (n - k))


def threshold_experiment(
    p: float,
    q: float,
    leaders: Sequence[int] = (0, 1, 2, 3),
    trials: int = 100_000,
    seed: int = 0,
    n: int | None = None,
    workers: int = 1,
) -> dict[str, Any]:
    """Unique-Leader decider on paths with ``k`` leaders, against ``p ** k``.

    Members are the ``k <= 1`` rows; the contract asks acceptance ``>= p``
    there and rejection ``>= q`` on the rest.  A side counts as holding when
    the 99% interval does not exclude the requirement.
    """
    p, q = float(p), float(q)
    if not (0 < p <= 1 and 0 < q <= 1):
        raise ValueError("p and q must lie in (0, 1]")
    n = n or max(3, *leaders)
    alg = unique_leader_decider(p)
    rows = []
    yes_side = no_side = True
    for k in leaders:
        config = leader_instance(k, n)
        est = estimate_acceptance(alg, config, IdAssignment.sequential(n), None, trials, seed, workers)
        member = L.UNIQUE_LEADER.member(config)
        lo, hi = est.interval
        if member:
            holds = hi >= p
            yes_side &= holds
        else:
            holds = 1 - lo >= q
            no_side &= holds
        rows.append(
            {
                "leaders": k,
                "member": member,
                "acceptance": est.point,
                "interval": [lo, hi],
                "analytic": p**k,
                "rejection": 1 - est.point,
                "requirement_holds": holds,
            }
        )
    return {
        "p": p,
        "q": q,
        "n": n,
        "trials": trials,
        "seed": seed,
        "p2_plus_q": p * p + q,
        "below_threshold": p * p + q <= 1,
        "yes_side_holds": yes_side,
        "no_side_holds": no_side,
        "contract_holds": yes_side and no_side,
        "rows": rows,
    }


# -- fooling -------------------------------------------------------------------


def path_cycle_fooling(decider: NodeAlgorithm, t: int, n: int, seed: int = 0) -> FoolingReport:
    """Two paths and a cycle on ``4n`` nodes that a radius-``t`` decider cannot tell apart.

    ``P1`` carries ids ``1..4n``, ``P2`` carries ``2n+1..4n, 1..2n`` and the
    cycle ``C`` carries ``1..4n``.  Nodes ``n+1..3n`` of ``C`` see what they
    see in ``P1``; nodes ``3n+1..4n, 1..n`` see what they see in ``P2``.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    if t >= n:
        raise RadiusTooLarge(f"t = {t} must be below n = {n} for the views to match")
    size = 4 * n
    p1_ids = IdAssignment(tuple(range(1, size + 1)))
    p2_ids = IdAssignment(tuple(range(2 * n + 1, size + 1)) + tuple(range(1, 2 * n + 1)))
    c_ids = IdAssignment(tuple(range(1, size + 1)))
    path = Configuration.uniform(path_graph(size))
    cycle = Configuration.uniform(cycle_graph(size))
    runs = {
        "P1": run(decider, path, p1_ids, seed=seed),
        "P2": run(decider, path, p2_ids, seed=seed),
        "C": run(decider, cycle, c_ids, seed=seed),
    }
    matched = True
    consistent = True
    for v in cycle.graph.nodes:
        ident = c_ids[v]
        source, ids = ("P1", p1_ids) if n < ident <= 3 * n else ("P2", p2_ids)
        u = ids.node_of(ident)
        same = views_isomorphic(ball(cycle, c_ids, v, t), ball(path, ids, u, t), match_ids=True, cap=2 * t + 1)
        matched &= same
        consistent &= runs["C"].outputs[v] == runs[source].outputs[u]
    middle = all(runs["P1"].outputs[p1_ids.node_of(i)] == YES for i in range(n + 1, 3 * n + 1))
    ends = all(
        runs["P2"].outputs[p2_ids.node_of(i)] == YES
        for i in itertools.chain(range(3 * n + 1, size + 1), range(1, n + 1))
    )
    return FoolingReport(
        construction="path-cycle",
        member_instance=(
            Instance(path, p1_ids, runs["P1"].outputs),
            Instance(path, p2_ids, runs["P2"].outputs),
        ),
        nonmember_instance=Instance(cycle, c_ids, runs["C"].outputs),
        witness=None,
        fooled=runs["C"].accepted,
        details={
            "t": t,
            "n": n,
            "views_match": matched,
            "outputs_match": consistent,
            "p1_middle_yes": middle,
            "p2_ends_yes": ends,
        },
    )


# -- sweeps --------------------------------------------------------------------


def _input_matrix(alphabet: Sequence[str], n: int) -> np.ndarray:
    return np.array(list(itertools.product(alphabet, repeat=n)), dtype=object).reshape(-1, n)


def pool_assignments(n: int, pool_size: int = 3, seed: int = 0) -> list[IdAssignment]:
    """Identity assignments drawn from a small pool.

    With ``n <= pool_size`` every injective map into ``1..pool_size``; above
    that, every permutation of ``1..n`` while that is at most 24 of them,
    else ascending, descending and one seeded shuffle.
    """
    if n <= pool_size:
        return list(id_assignments(n, range(1, pool_size + 1)))
    if n <= 4:
        return list(id_assignments(n, range(1, n + 1)))
    base = list(range(1, n + 1))
    shuffled = base[:]
    random.Random(seed).shuffle(shuffled)
    return [IdAssignment(tuple(base)), IdAssignment(tuple(reversed(base))), IdAssignment(tuple(shuffled))]


def derand_check(
    lang: L.Language = L.COLORING,
    p: float = 0.9,
    q: float = 0.9,
    tstar: int = 8,
    max_n: int = 8,
    alphabet: Sequence[str] = L.COLORS,
    sim_max_n: int = 4,
    pool_size: int = 3,
) -> dict[str, Any]:
    """Algorithm D against the membership oracle on every small configuration.

    Every connected graph up to ``max_n`` nodes (up to isomorphism) with
    every input vector is evaluated through the decider's balls in bulk;
    graphs up to ``sim_max_n`` nodes are also run through the simulator
    under every identity assignment from the pool.
    """
    alg = algorithm_d(lang, derand_params(p, q), tstar)
    configs = mismatches = 0
    first = None
    for n in range(1, max_n + 1):
        inputs = _input_matrix(alphabet, n)
        for g in connected_graphs(n):
            ids = IdAssignment.sequential(n)
            decided = ball_outputs_batch(alg, g, ids, inputs).all(axis=1)
            truth = lang.member_batch(g, inputs)
            bad = np.flatnonzero(decided != truth)
            configs += len(inputs)
            mismatches += len(bad)
            if len(bad) and first is None:
                first = {"edges": g.edges(), "inputs": list(inputs[bad[0]])}
    sim_runs = sim_mismatches = 0
    for n in range(1, sim_max_n + 1):
        assignments = pool_assignments(n, pool_size)
        for g in connected_graphs(n):
            for xs in itertools.product(alphabet, repeat=n):
                config = Configuration(g, xs)
                truth = lang.member(config)
                for ids in assignments:
                    sim_runs += 1
                    if run(alg, config, ids).accepted != truth:
                        sim_mismatches += 1
                        if first is None:
                            first = {"edges": g.edges(), "inputs": list(xs), "ids": list(ids.ids)}
    return {
        "language": lang.name,
        "lambda": alg.params.lam,
        "delta": str(alg.params.delta),
        "tstar": tstar,
        "radius": alg.radius_for(1),
        "configurations": configs,
        "mismatches": mismatches,
        "simulated_runs": sim_runs,
        "simulated_mismatches": sim_mismatches,
        "first_mismatch": first,
        "agrees": mismatches == 0 and sim_mismatches == 0,
    }


def splitter_sweep(
    lang: L.Language,
    max_n: int,
    alphabet: Sequence[str],
    radius_bound: int,
    min_n: int = 1,
) -> dict[str, Any]:
    """Check the splitter merge implication for every splitter with connected parts.

    Whether a tripartition is a splitter depends only on the graph, so
    splitters are enumerated once per graph and the implication is checked
    for all input vectors at once.
    """
    checked = violations = 0
    first = None
    for n in range(min_n, max_n + 1):
        inputs = _input_matrix(alphabet, n)
        for g in connected_graphs(n):
            whole = lang.member_batch(g, inputs)
            cache: dict[frozenset[int], np.ndarray] = {}

            def part(nodes: frozenset[int]) -> np.ndarray:
                if nodes not in cache:
                    sub, order = g.induced(nodes)
                    cache[nodes] = lang.member_batch(sub, inputs[:, list(order)])
                return cache[nodes]

            for sp in find_splitters(Configuration.uniform(g), radius_bound):
                if not has_connected_parts(Configuration.uniform(g), sp):
                    continue
                bad = part(sp.u1 | sp.s) & part(sp.u2 | sp.s) & ~whole
                checked += len(inputs)
                k = int(bad.sum())
                violations += k
                if k and first is None:
                    row = int(np.flatnonzero(bad)[0])
                    first = {
                        "edges": g.edges(),
                        "inputs": list(inputs[row]),
                        "s": sorted(sp.s),
                        "u1": sorted(sp.u1),
                        "u2": sorted(sp.u2),
                    }
    return {
        "language": lang.name,
        "max_n": max_n,
        "radius_bound": radius_bound,
        "checked": checked,
        "violations": violations,
        "first_violation": first,
    }


def oracle_sweep(
    decider: NodeAlgorithm,
    lang: L.Language,
    max_n: int,
    alphabet: Sequence[str],
    assignments: Callable[[int], Sequence[IdAssignment]] | None = None,
) -> dict[str, Any]:
    """Simulated verdicts against the oracle on every configuration up to ``max_n`` nodes."""
    runs = mismatches = 0
    first = None
    for n in range(1, max_n + 1):
        id_list = assignments(n) if assignments else [IdAssignment.sequential(n)]
        for g in connected_graphs(n):
            for xs in itertools.product(alphabet, repeat=n):
                config = Configuration(g, xs)
                try:
                    truth = lang.member(config)
                except MalformedInput:
                    truth = False
                for ids in id_list:
                    runs += 1
                    if run(decider, config, ids).accepted != truth:
                        mismatches += 1
                        if first is None:
                            first = {"edges": g.edges(), "inputs": list(xs), "ids": list(ids.ids)}
    return {"decider": decider.name, "language": lang.name, "runs": runs, "mismatches": mismatches, "first_mismatch": first}


def hereditary_report(names: Sequence[str], node_cap: int = 5) -> dict[str, Any]:
    out = {}
    for name in names:
        lang = L.get(name)
        ok, cx = L.check_hereditary(lang, node_cap)
        entry: dict[str, Any] = {"hereditary": ok}
        if cx is not None:
            entry["counterexample"] = {
                "edges": cx.config.graph.edges(),
                "inputs": list(cx.config.inputs),
                "prefix": sorted(cx.subset),
            }
        out[lang.name] = entry
    return {"node_cap": node_cap, "languages": out}


def reduce_check(lang_name: str, target: str, node_cap: int, id_pool: Sequence[int], alphabet: Sequence[str], t: int = 1, cap: int = 4):
    lang = L.get(lang_name)
    red = cover_reduction(lang, cap) if target == "cover" else containment_reduction(lang, t, cap)
    ok, cx = check_reduction(red, node_cap, id_pool, alphabet)
    doc: dict[str, Any] = {"language": lang.name, "target": target, "node_cap": node_cap, "id_pool": list(id_pool), "equivalent": ok}
    if cx is not None:
        doc["counterexample"] = {
            "edges": cx.config.graph.edges(),
            "inputs": list(cx.config.inputs),
            "ids": list(cx.ids.ids),
            "source_member": cx.source_member,
            "target_member": cx.target_member,
        }
    return doc


# -- locality ------------------------------------------------------------------


def random_connected_graph(rng: random.Random, n: int, extra: float = 0.3) -> Graph:
    """Random tree plus each non-tree pair independently with probability ``extra``."""
    edges = {(rng.randrange(v), v) for v in range(1, n)}
    for a, b in itertools.combinations(range(n), 2):
        if (a, b) not in edges and rng.random() < extra:
            edges.add((a, b))
    return Graph.from_edges(n, edges)


@dataclass(frozen=True)
class LocalityCase:
    """An algorithm plus a way to draw inputs and certificates for it."""

    algorithm: NodeAlgorithm
    inputs: Sequence[str]
    certificates: Sequence[str] | None = None


def _surgery(rng: random.Random, config: Configuration, ids: IdAssignment, cert, v: int, r: int, case: LocalityCase):
    """Change inputs, certificates and edges strictly outside what ``v`` sees in ``r`` rounds."""
    g = config.graph
    dist = g.distances[v]
    outside = [u for u in g.nodes if dist[u] > r]
    rim = [u for u in g.nodes if dist[u] == r]
    inputs = list(config.inputs)
    certs = list(cert) if cert is not None else None
    for u in outside:
        inputs[u] = rng.choice(case.inputs)
        if certs is not None:
            certs[u] = rng.choice(case.certificates)
    edges = set(g.edges())
    # Toggle pairs among outside and rim nodes; rim-rim edges are invisible at round r.
    far = sorted(outside + rim)
    for a, b in itertools.combinations(far, 2):
        if (a in outside or b in outside) or (dist[a] == r and dist[b] == r):
            if rng.random() < 0.3:
                edges ^= {(a, b)}
    n = g.n
    new_ids = list(ids.ids)
    if far and rng.random() < 0.5:
        anchor = rng.choice(far)
        edges.add((anchor, n))
        inputs.append(rng.choice(case.inputs))
        if certs is not None:
            certs.append(rng.choice(case.certificates))
        new_ids.append(max(new_ids) + 1)
        n += 1
    try:
        h = Graph.from_edges(n, edges)
    except GraphError:
        return None
    if any(h.distances[v][u] != dist[u] for u in g.nodes if dist[u] <= r):
        return None
    return Configuration(h, tuple(inputs)), IdAssignment(tuple(new_ids)), certs


def locality_check(case: LocalityCase, trials: int = 1000, max_n: int = 10, seed: int = 0) -> dict[str, Any]:
    """Outputs never change under surgery outside the ball a node had time to see."""
    rng = random.Random(seed)
    alg = case.algorithm
    checked = violations = skipped = 0
    first = None
    for trial in range(trials):
        n = rng.randint(2, max_n)
        g = random_connected_graph(rng, n)
        config = Configuration(g, tuple(rng.choice(case.inputs) for _ in range(n)))
        ids = IdAssignment(tuple(rng.sample(range(1, 4 * max_n), n)))
        cert = [rng.choice(case.certificates) for _ in range(n)] if case.certificates else None
        before = run(alg, config, ids, cert, seed=trial)
        v = rng.randrange(n)
        r = before.rounds_used[v]
        altered = _surgery(rng, config, ids, cert, v, r, case)
        if altered is None:
            skipped += 1
            continue
        config2, ids2, cert2 = altered
        after = run(alg, config2, ids2, cert2, seed=trial)
        checked += 1
        if after.outputs[v] != before.outputs[v]:
            violations += 1
            if first is None:
                first = {"trial": trial, "node": v, "rounds": r}
    return {
        "algorithm": alg.name,
        "trials": trials,
        "checked": checked,
        "skipped": skipped,
        "violations": violations,
        "first_violation": first,
    }


def shipped_locality_cases() -> dict[str, LocalityCase]:
    """One case per shipped algorithm, with inputs (and certificates) to draw from."""
    from .certificates import (
        containment_certify,
        encode_inpeqsize_certificate,
        integer_certificates,
        universal_certify,
    )
    from .graph import complete_graph
    from .reductions import reduce_to_containment

    small_d = DerandParams(Fraction(1, 2), 1)
    # Certificate pools taken from honest certificates of small members, so
    # some trials accept and some reject.
    tri = Configuration(complete_graph(3), ("0", "0", "1"))
    maps = universal_certify(tri, IdAssignment.sequential(3)).values
    edge = Configuration(path_graph(2), ("0", "1"))
    reduced = reduce_to_containment(L.COLORING, 1, edge, IdAssignment.sequential(2))
    boxes = containment_certify(reduced).values
    return {
        "coloring": LocalityCase(coloring_decider(), L.COLORS),
        "mis": LocalityCase(mis_decider(), ("0", "1")),
        "unique-leader": LocalityCase(unique_leader_decider(0.6), ("0", "0", "1")),
        "ball-tree": LocalityCase(ball_decider(L.TREE, 2), ("",)),
        "algorithm-d": LocalityCase(algorithm_d(L.COLORING, small_d, 1), ("0", "1")),
        "tree-verifier": LocalityCase(tree_verifier(), ("",), integer_certificates(4)),
        "inpeqsize-verifier": LocalityCase(
            inpeqsize_verifier(),
            ("11", "100"),
            [encode_inpeqsize_certificate(k, d) for k in (3, 4) for d in range(4)],
        ),
        "universal": LocalityCase(universal_bpnld_decider(L.UNIQUE_LEADER, 0.6), ("0", "1"), maps),
        "containment-verifier": LocalityCase(containment_verifier(), reduced.inputs, boxes),
    }


# -- dispatch ------------------------------------------------------------------


def run_experiment(config: ExperimentConfig) -> dict[str, Any]:
    """Run one experiment and attach provenance."""
    prm = config.parameters
    if config.kind == "threshold":
        body = threshold_experiment(
            prm.get("p", 0.6),
            prm.get("q", 0.6),
            tuple(prm.get("leaders", (0, 1, 2, 3))),
            config.trials,
            config.seed,
            prm.get("n"),
            prm.get("workers", 1),
        )
    elif config.kind == "estimate":
        k = int(prm.get("leaders", 1))
        n = int(prm.get("n", max(3, k)))
        alg = make_decider(prm.get("decider", "unique-leader"), prm)
        est = estimate_acceptance(alg, leader_instance(k, n), IdAssignment.sequential(n), None, config.trials, config.seed)
        body = est.to_json()
    elif config.kind == "fool-ld":
        t = int(prm.get("t", 1))
        decider = make_decider(prm.get("decider", "ball"), {"lang": "tree", "radius": t, **prm})
        body = path_cycle_fooling(decider, t, int(prm.get("n", 8)), config.seed).to_json()
    elif config.kind == "fool-nld":
        body = inpeqsize_fooling(inpeqsize_verifier(), int(prm.get("t", 1)), config.seed).to_json()
    elif config.kind == "reduce-check":
        body = reduce_check(
            prm.get("lang", "coloring"),
            prm.get("target", "cover"),
            int(prm.get("node_cap", 2)),
            tuple(prm.get("id_pool", (1, 2, 3))),
            tuple(prm.get("alphabet", ("0", "1"))),
            int(prm.get("t", 1)),
            int(prm.get("cap", 4)),
        )
    elif config.kind == "hereditary-check":
        body = hereditary_report(
            tuple(prm.get("languages", ("coloring", "unique-leader", "tree", "inpeqsize", "mis"))),
            int(prm.get("node_cap", 5)),
        )
    else:  # derand-check
        body = derand_check(
            L.get(prm.get("lang", "coloring")),
            prm.get("p", 0.9),
            prm.get("q", 0.9),
            int(prm.get("tstar", 8)),
            int(prm.get("max_n", 8)),
            tuple(prm.get("alphabet", L.COLORS)),
            int(prm.get("sim_max_n", 4)),
        )
    return {"provenance": provenance(config), "result": body}


def report_to_csv(report: Mapping[str, Any]) -> str:
    """Flat projection: one line per row if the result has ``rows``, else one line of scalars."""
    result = report.get("result", report)
    rows = result.get("rows") if isinstance(result, Mapping) else None
    if not rows:
        rows = [{k: v for k, v in result.items() if not isinstance(v, (dict, list))}]
    buf = io.StringIO()
    fields = list(dict.fromkeys(k for row in rows for k in row))
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (";".join(map(str, v)) if isinstance(v, list) else v) for k, v in row.items()})
    return buf.getvalue()
