"""Deterministic and randomized local deciders, and derandomization.

The derandomization turns a ``(p, q)``-decider with ``p**2 + q > 1`` for a
hereditary language into a deterministic decider: every node ``u`` computes a
radius bound ``t*_u`` and answers yes iff its ball of radius
``2 * lambda * t*_u`` is itself a member of the language.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BitBudgetExceeded, DisconnectedPart, MalformedInput, ThresholdViolated
from .graph import Configuration, Graph, IdAssignment, Splitter, ball_nodes, prefix
from .languages import Language
from .runtime import (
    NO,
    YES,
    Coins,
    Flooding,
    Knowledge,
    NodeAlgorithm,
    OneRound,
    derive_seed,
    enumerate_scripts,
    run,
)

log = logging.getLogger(__name__)

LAMBDA_FACTOR = 11
EXACT_BIT_BUDGET = 20
SAMPLED_RUNS = 1000


class ColoringDecider(OneRound):
    """Exchange colours; say no iff a neighbour has the same colour."""

    name = "coloring"

    def announce(self, me):
        return me.node_input

    def judge(self, me, received, coins):
        return NO if me.node_input in received else YES


class MISDecider(OneRound):
    name = "mis"

    def announce(self, me):
        return me.node_input

    def judge(self, me, received, coins):
        if me.node_input not in ("0", "1") or any(x not in ("0", "1") for x in received):
            return NO
        selected_nbr = "1" in received
        if me.node_input == "1":
            return NO if selected_nbr else YES
        return YES if selected_nbr else NO


class UniqueLeaderDecider(NodeAlgorithm):
    """Zero rounds: a leader says yes with probability ``p``, others always yes."""

    name = "unique-leader"
    randomized = True

    def __init__(self, p: float):
        if not 0 < p <= 1:
            raise ValueError("p must lie in (0, 1]")
        self.p = float(p)

    def init(self, node_id, node_input, certificate, degree):
        return node_input

    def step(self, state, rnd, inbox, coins):
        if state == "0":
            return state, {}, YES
        if state != "1":
            return state, {}, NO
        return state, {}, YES if coins.bernoulli(self.p) else NO


def coloring_decider() -> ColoringDecider:
    return ColoringDecider()


def mis_decider() -> MISDecider:
    return MISDecider()


def unique_leader_decider(p: float) -> UniqueLeaderDecider:
    return UniqueLeaderDecider(p)


# -- parameters ----------------------------------------------------------------


@dataclass(frozen=True)
class DeciderSpec:
    p: Fraction
    q: Fraction
    t: str = "constant"

    def __post_init__(self):
        if not (0 < self.p <= 1 and 0 < self.q <= 1):
            raise ValueError("p and q must lie in (0, 1]")
        if self.t not in ("constant", "known-per-instance", "self-estimated"):
            raise ValueError(f"unknown radius descriptor {self.t!r}")

    @property
    def above_threshold(self) -> bool:
        return self.p * self.p + self.q > 1


@dataclass(frozen=True)
class DerandParams:
    delta: Fraction
    lam: int

    def __post_init__(self):
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if self.lam < 1:
            raise ValueError("lambda must be a positive integer")


def derand_params(p: float | Fraction, q: float | Fraction) -> DerandParams:
    """``delta`` at the midpoint of ``(0, p**2 + q - 1)`` and ``lambda = 11 * ceil(log p / log(1 - delta))``.

    ``lambda`` is clamped below at 11, which only matters for ``p == 1``.
    """
    p, q = Fraction(p).limit_denominator(10**9), Fraction(q).limit_denominator(10**9)
    if not (0 < p <= 1 and 0 < q <= 1):
        raise ValueError("p and q must lie in (0, 1]")
    slack = p * p + q - 1
    if slack <= 0:
        raise ThresholdViolated(f"p^2 + q = {float(p * p + q):g} <= 1")
    delta = slack / 2
    ratio = math.log(p) / math.log(1 - delta)
    lam = LAMBDA_FACTOR * math.ceil(ratio - 1e-12)
    return DerandParams(delta, max(lam, LAMBDA_FACTOR))


# -- ball deciders -------------------------------------------------------------


def _safe_member(lang: Language, config: Configuration) -> bool:
    try:
        return lang.member(config)
    except MalformedInput:
        return False


class BallDecider(Flooding):
    """Collect the ball of radius ``radius_for(id)`` and test it for membership.

    A node stops early once it knows the whole graph, since every larger ball
    is then the graph itself.
    """

    name = "ball"

    def __init__(self, lang: Language, radius: int):
        self.lang = lang
        self.radius = radius

    def radius_for(self, node_id: int) -> int:
        return self.radius

    def horizon(self, node_id: int) -> int:
        """Radius up to which the node keeps collecting (and relaying)."""
        return self.radius_for(node_id)

    def decide(self, know: Knowledge, rnd: int, coins: Coins) -> str | None:
        # Adjacency between the outermost nodes arrives one round after them.
        if rnd < self.horizon(know.me) + 1 and not know.saturated():
            return None
        config, _ = know.ball(self.radius_for(know.me))
        return YES if _safe_member(self.lang, config) else NO


class AlgorithmD(BallDecider):
    name = "algorithm-d"

    def __init__(self, lang: Language, params: DerandParams, tstar: int | Mapping[int, int]):
        super().__init__(lang, 0)
        self.params = params
        self.tstar = tstar

    def radius_for(self, node_id: int) -> int:
        t = self.tstar if isinstance(self.tstar, int) else self.tstar[node_id]
        return 2 * self.params.lam * t

    def horizon(self, node_id: int) -> int:
        # A terminated node stops relaying, so with unequal radii every node
        # keeps collecting until the largest ball is complete.
        if isinstance(self.tstar, int):
            return self.radius_for(node_id)
        return 2 * self.params.lam * max(self.tstar.values())


def ball_decider(lang: Language, radius: int) -> BallDecider:
    return BallDecider(lang, radius)


def algorithm_d(lang: Language, params: DerandParams, tstar: int | Mapping[int, int]) -> AlgorithmD:
    """Deterministic decider from the derandomization.

    ``tstar`` is one radius bound for every node or a map from identity to
    bound (see :func:`tstar_by_id`).
    """
    return AlgorithmD(lang, params, tstar)


def ball_outputs(lang: Language, config: Configuration, ids: IdAssignment, alg: BallDecider) -> tuple[str, ...]:
    """Centralized evaluation of a ball decider's outputs (no simulation)."""
    g = config.graph
    out = []
    for v in g.nodes:
        nodes = ball_nodes(g, v, alg.radius_for(ids[v]))
        out.append(YES if _safe_member(lang, prefix(config, nodes)) else NO)
    return tuple(out)


def ball_outputs_batch(alg: BallDecider, graph: Graph, ids: IdAssignment, inputs: np.ndarray) -> np.ndarray:
    """Outputs of a ball decider for many input vectors on one graph.

    Returns a boolean array of shape ``(rows, n)``; ``True`` means yes.
    """
    out = np.empty((len(inputs), graph.n), dtype=bool)
    seen: dict[frozenset[int], np.ndarray] = {}
    for v in graph.nodes:
        nodes = frozenset(ball_nodes(graph, v, alg.radius_for(ids[v])))
        if nodes not in seen:
            sub, order = graph.induced(nodes)
            seen[nodes] = alg.lang.member_batch(sub, inputs[:, list(order)])
        out[:, v] = seen[nodes]
    return out


# -- running-time bounds -------------------------------------------------------


@dataclass(frozen=True)
class TStar:
    tprime: dict[int, int]
    tstar: dict[int, int]
    exact: bool
    runs: int

    def by_id(self, ids: IdAssignment) -> dict[int, int]:
        return tstar_by_id(self.tstar, ids)


def tstar_by_id(tstar: Mapping[int, int], ids: IdAssignment) -> dict[int, int]:
    return {ids[v]: t for v, t in tstar.items()}


def _pow2_at_least(x: int) -> int:
    return 1 << max(x - 1, 0).bit_length()


def max_running_times(
    base: NodeAlgorithm,
    config: Configuration,
    ids: IdAssignment,
    seed: int = 0,
    bit_budget: int = EXACT_BIT_BUDGET,
    samples: int = SAMPLED_RUNS,
    allow_sampling: bool = True,
    certificate=None,
) -> tuple[list[int], bool, int]:
    """Per-node maximum rounds over all coin outcomes.

    Exhaustive over coin outcomes while a run draws at most ``bit_budget``
    binary choices; otherwise the maximum over ``samples`` seeded runs, with
    ``exact`` reported as False.
    """
    best = [0] * config.n
    runs = 0
    try:
        for _, result in enumerate_scripts(
            lambda tape: run(base, config, ids, certificate, coins=tape.for_node), bit_budget
        ):
            runs += 1
            best = [max(a, b) for a, b in zip(best, result.rounds_used)]
        return best, True, runs
    except BitBudgetExceeded:
        if not allow_sampling:
            raise
    log.warning("coin enumeration infeasible; sampling %d runs instead", samples)
    best = [0] * config.n
    for i in range(samples):
        result = run(base, config, ids, certificate, seed=derive_seed(seed, i))
        best = [max(a, b) for a, b in zip(best, result.rounds_used)]
    return best, False, samples


def estimate_tstar(
    base: NodeAlgorithm,
    config: Configuration,
    ids: IdAssignment,
    c: int,
    seed: int = 0,
    bit_budget: int = EXACT_BIT_BUDGET,
    allow_sampling: bool = True,
) -> TStar:
    """Radius bounds by doubling.

    ``t'_v`` is the smallest power of two covering the worst-case running
    time of ``v`` (at least 1).  ``t*_v`` is the smallest power of two with
    ``c * t'_v <= t*_v`` and ``t'_u <= t*_v`` for all ``u`` within distance
    ``c * t*_v``.
    """
    if c < 1:
        raise ValueError("c must be a positive integer")
    times, exact, runs = max_running_times(base, config, ids, seed, bit_budget, allow_sampling=allow_sampling)
    g = config.graph
    tprime = {v: _pow2_at_least(max(t, 1)) for v, t in enumerate(times)}
    tstar = {}
    for v in g.nodes:
        t = 1
        while not (c * tprime[v] <= t and all(tprime[u] <= t for u in ball_nodes(g, v, c * t))):
            t *= 2
        tstar[v] = t
    return TStar(tprime, tstar, exact, runs)


# -- splitters -----------------------------------------------------------------


def splitter_parts(config: Configuration, splitter: Splitter) -> tuple[Configuration, Configuration]:
    g = config.graph
    first = splitter.u1 | splitter.s
    second = splitter.u2 | splitter.s
    for part in (first, second):
        if not part or not g.is_connected_subset(part):
            raise DisconnectedPart(f"G[{sorted(part)}] is not connected")
    return prefix(config, first), prefix(config, second)


def has_connected_parts(config: Configuration, splitter: Splitter) -> bool:
    g = config.graph
    return all(p and g.is_connected_subset(p) for p in (splitter.u1 | splitter.s, splitter.u2 | splitter.s))


def check_splitter_merge(lang: Language, config: Configuration, ids: IdAssignment, splitter: Splitter) -> bool:
    """Whether both halves in the language implies the whole is.

    ``ids`` is accepted because whether a tripartition is a splitter can
    depend on identities; membership itself never does.
    """
    first, second = splitter_parts(config, splitter)
    if _safe_member(lang, first) and _safe_member(lang, second):
        return _safe_member(lang, config)
    return True
