"""Synchronous LOCAL-model simulator.

A :class:`NodeAlgorithm` is a pair of pure functions.  ``init`` sees only
what a node knows before round 0 (identity, input, certificate, number of
ports); ``step`` is called once per round with the messages that arrived on
each port.  Messages sent in round ``r`` are delivered in round ``r + 1``.
Payloads are opaque to the simulator and may be any Python value.

Randomness is per node and per round, drawn from a counter-based generator
keyed by ``(seed, id, round)``, so a run does not depend on the order in
which nodes are stepped.
"""

from __future__ import annotations

import hashlib
import math
import struct
from collections.abc import Iterable, Mapping, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from statistics import NormalDist
from typing import Any, Callable

from .errors import BitBudgetExceeded, LocalDError, RoundCapExceeded
from .graph import Configuration, Graph, IdAssignment

YES = "yes"
NO = "no"
ACCEPT = "accept"
REJECT = "reject"

Z99 = NormalDist().inv_cdf(0.995)

_U64 = struct.Struct("<Q")


# -- randomness ----------------------------------------------------------------


def derive_seed(seed: int, *parts: int) -> int:
    """Hash ``seed`` and ``parts`` into an independent 64-bit seed."""
    h = hashlib.blake2b(digest_size=8)
    for x in (seed, *parts):
        h.update(x.to_bytes(16, "little", signed=True))
    return _U64.unpack(h.digest())[0]


class Coins:
    """Source of coin tosses handed to a node for one round."""

    drawn = 0

    def random(self) -> float:
        raise NotImplementedError

    def bit(self) -> int:
        return int(self.random() < 0.5)

    def bernoulli(self, p: float) -> bool:
        return self.random() < p

    def randbelow(self, n: int) -> int:
        return min(int(self.random() * n), n - 1)


class CoinStream(Coins):
    """Counter-based stream: draw ``k`` is ``blake2b(seed, id, round, k)``."""

    __slots__ = ("_prefix", "drawn")

    def __init__(self, seed: int, node_id: int, rnd: int):
        self._prefix = seed.to_bytes(16, "little", signed=True) + node_id.to_bytes(16, "little") + rnd.to_bytes(8, "little")
        self.drawn = 0

    def _u64(self) -> int:
        digest = hashlib.blake2b(self._prefix + _U64.pack(self.drawn), digest_size=8).digest()
        self.drawn += 1
        return _U64.unpack(digest)[0]

    def random(self) -> float:
        return (self._u64() >> 11) * (1.0 / (1 << 53))

    def bit(self) -> int:
        return self._u64() & 1


class CoinTape:
    """Replays a scripted sequence of binary choices shared by all nodes.

    Used to enumerate every coin outcome of a run: each ``bit`` or
    ``bernoulli`` call is one binary choice (outcome 1 means "heads" / True).
    Choices past the end of the script read as 0 and are recorded.
    """

    def __init__(self, script: Sequence[int] = (), budget: int = 20):
        self.script = list(script)
        self.trace: list[int] = []
        self.budget = budget

    def choose(self) -> int:
        k = len(self.trace)
        if k >= self.budget:
            raise BitBudgetExceeded(f"run draws more than {self.budget} coin bits")
        b = self.script[k] if k < len(self.script) else 0
        self.trace.append(b)
        return b

    def for_node(self, node_id: int, rnd: int) -> Coins:
        return _TapeCoins(self)


class _TapeCoins(Coins):
    def __init__(self, tape: CoinTape):
        self.tape = tape
        self.drawn = 0

    def bit(self) -> int:
        self.drawn += 1
        return self.tape.choose()

    def bernoulli(self, p: float) -> bool:
        self.drawn += 1
        return bool(self.tape.choose())

    def random(self) -> float:
        raise BitBudgetExceeded("continuous draws cannot be enumerated")

    def randbelow(self, n: int) -> int:
        raise BitBudgetExceeded("continuous draws cannot be enumerated")


def enumerate_scripts(run_with: Callable[[CoinTape], Any], budget: int = 20):
    """Yield ``(trace, result)`` for every coin outcome, depth first.

    ``run_with`` executes one run driven by the given tape.  The next script
    is obtained by dropping trailing ones from the trace and flipping the
    last zero, so every leaf of the choice tree is visited exactly once.
    """
    script: list[int] = []
    while True:
        tape = CoinTape(script, budget)
        result = run_with(tape)
        trace = tape.trace
        yield list(trace), result
        while trace and trace[-1] == 1:
            trace.pop()
        if not trace:
            return
        trace[-1] = 1
        script = trace


# -- algorithms ----------------------------------------------------------------


class NodeAlgorithm:
    """Per-node program run by :func:`run`.

    ``step`` returns ``(state, outbox, output)``; ``outbox`` maps port to
    payload and ``output`` is ``None`` while the node keeps running.  Once a
    node outputs it is terminated: later messages to it are dropped.
    """

    name = "algorithm"
    randomized = False
    uses_certificate = False

    def init(self, node_id: int, node_input: str, certificate: str | None, degree: int) -> Any:
        raise NotImplementedError

    def step(self, state: Any, rnd: int, inbox: Mapping[int, Any], coins: Coins) -> tuple[Any, Mapping[int, Any], str | None]:
        raise NotImplementedError


@dataclass(frozen=True)
class LocalState:
    node_id: int
    node_input: str
    certificate: str | None
    degree: int


class OneRound(NodeAlgorithm):
    """Announce something to every neighbour in round 0, judge in round 1."""

    def init(self, node_id, node_input, certificate, degree):
        return LocalState(node_id, node_input, certificate, degree)

    def announce(self, me: LocalState) -> Any:
        return (me.node_id, me.node_input, me.certificate)

    def judge(self, me: LocalState, received: list[Any], coins: Coins) -> str:
        raise NotImplementedError

    def step(self, state, rnd, inbox, coins):
        if rnd == 0:
            msg = self.announce(state)
            return state, {p: msg for p in range(state.degree)}, None
        received = [inbox[p] for p in sorted(inbox)]
        return state, {}, self.judge(state, received, coins)


@dataclass
class Knowledge:
    """What a flooding node has learned so far.

    ``records`` maps identity to ``(input, certificate, neighbour ids)``;
    the neighbour tuple is ``None`` until that node's adjacency is known.
    After round ``r`` the node knows every node within distance ``r`` and the
    adjacency of every node within distance ``r - 1``.
    """

    me: int
    degree: int
    records: dict[int, tuple[str, str | None, tuple[int, ...] | None]]

    def merge(self, other: Mapping[int, tuple]) -> None:
        for ident, rec in other.items():
            mine = self.records.get(ident)
            if mine is None or (mine[2] is None and rec[2] is not None):
                self.records[ident] = rec

    def saturated(self) -> bool:
        """True once the whole (connected) graph is known."""
        recs = self.records
        return all(r[2] is not None and all(w in recs for w in r[2]) for r in recs.values())

    def distances(self) -> dict[int, int]:
        dist = {self.me: 0}
        frontier = [self.me]
        while frontier:
            nxt = []
            for u in frontier:
                nbrs = self.records[u][2]
                if nbrs is None:
                    continue
                for w in nbrs:
                    if w not in dist and w in self.records:
                        dist[w] = dist[u] + 1
                        nxt.append(w)
            frontier = nxt
        return dist

    def ball(self, radius: int) -> tuple[Configuration, IdAssignment]:
        """Induced ball around this node; node 0 of the result is the center."""
        dist = self.distances()
        members = [self.me] + sorted(i for i, d in dist.items() if d <= radius and i != self.me)
        pos = {i: k for k, i in enumerate(members)}
        edges = set()
        for i in members:
            nbrs = self.records[i][2]
            if nbrs is None:
                continue
            for w in nbrs:
                if w in pos:
                    edges.add((min(pos[i], pos[w]), max(pos[i], pos[w])))
        g = Graph.from_edges(len(members), sorted(edges), [str(i) for i in members])
        return Configuration(g, tuple(self.records[i][0] for i in members)), IdAssignment(tuple(members))


class Flooding(NodeAlgorithm):
    """Full-information flooding; subclasses decide from :class:`Knowledge`.

    ``decide`` is called after every round's messages are merged and returns
    an output or ``None`` to keep collecting.  The deciding step still sends
    everything the node knows, so a node that stops early because it has seen
    the whole graph hands that knowledge to its neighbours.
    """

    def init(self, node_id, node_input, certificate, degree):
        return Knowledge(node_id, degree, {node_id: (node_input, certificate, None if degree else ())})

    def decide(self, know: Knowledge, rnd: int, coins: Coins) -> str | None:
        raise NotImplementedError

    def step(self, state: Knowledge, rnd, inbox, coins):
        if rnd == 1:
            nbrs = tuple(sorted(msg[0] for msg in inbox.values()))
            inp, cert, _ = state.records[state.me]
            state.records[state.me] = (inp, cert, nbrs)
        for msg in inbox.values():
            state.merge(msg[1])
        out = self.decide(state, rnd, coins)
        payload = (state.me, dict(state.records))
        return state, {p: payload for p in range(state.degree)}, out


# -- runs ----------------------------------------------------------------------


@dataclass(frozen=True)
class RunResult:
    outputs: tuple[str, ...]
    rounds_used: tuple[int, ...]
    names: tuple[str, ...] = ()

    @property
    def verdict(self) -> str:
        return verdict(self.outputs)

    @property
    def accepted(self) -> bool:
        return self.verdict == ACCEPT

    def output_map(self) -> dict[str, str]:
        return dict(zip(self.names, self.outputs))

    def to_json(self) -> dict:
        doc = {
            "outputs": self.output_map(),
            "rounds_used": dict(zip(self.names, self.rounds_used)),
        }
        if all(o in (YES, NO) for o in self.outputs):
            doc["verdict"] = self.verdict
        return doc


def verdict(outputs: Mapping[Any, str] | Iterable[str]) -> str:
    """AND rule: accept iff every node said yes."""
    values = list(outputs.values()) if isinstance(outputs, Mapping) else list(outputs)
    if not values:
        raise ValueError("verdict of an empty output set")
    for o in values:
        if o not in (YES, NO):
            raise ValueError(f"not a decision output: {o!r}")
    return ACCEPT if all(o == YES for o in values) else REJECT


@lru_cache(maxsize=4096)
def _back_ports(graph: Graph) -> tuple[tuple[int, ...], ...]:
    """``back[v][i]`` is the port at ``adjacency[v][i]`` leading back to ``v``."""
    adj = graph.adjacency
    return tuple(tuple(adj[w].index(v) for w in adj[v]) for v in graph.nodes)


CertificateLike = Mapping[int, str] | Sequence[str] | None


def _cert_tuple(certificate: CertificateLike, n: int) -> tuple[str | None, ...]:
    if certificate is None:
        return (None,) * n
    if isinstance(certificate, Mapping):
        missing = [v for v in range(n) if v not in certificate]
        if missing:
            raise LocalDError(f"certificate undefined on nodes {missing}")
        return tuple(certificate[v] for v in range(n))
    values = tuple(getattr(certificate, "values", certificate))
    if len(values) != n:
        raise LocalDError("certificate must be defined on every node")
    return values


def default_round_cap(config: Configuration) -> int:
    return 2 * config.n


def run(
    alg: NodeAlgorithm,
    config: Configuration,
    ids: IdAssignment,
    certificate: CertificateLike = None,
    seed: int = 0,
    round_cap: int | None = None,
    coins: Callable[[int, int], Coins] | None = None,
) -> RunResult:
    """Simulate ``alg`` until every node has output.

    ``coins(node_id, round)`` overrides the default per-node coin streams.
    """
    g = config.graph
    n = g.n
    if len(ids) != n:
        raise LocalDError("id assignment does not match the graph")
    cap = default_round_cap(config) if round_cap is None else round_cap
    certs = _cert_tuple(certificate, n)
    adj = g.adjacency
    back = _back_ports(g)
    make_coins = coins or (lambda ident, rnd: CoinStream(seed, ident, rnd))
    states = [alg.init(ids[v], config.inputs[v], certs[v], len(adj[v])) for v in range(n)]
    outputs: list[str | None] = [None] * n
    rounds: list[int] = [0] * n
    inboxes: list[dict[int, Any]] = [{} for _ in range(n)]
    pending = n
    rnd = 0
    while pending:
        if rnd > cap:
            raise RoundCapExceeded(
                f"{pending} node(s) still running after round cap {cap}",
                [g.names[v] for v in range(n) if outputs[v] is None],
            )
        nxt: list[dict[int, Any]] = [{} for _ in range(n)]
        for v in range(n):
            if outputs[v] is not None:
                continue
            state, outbox, out = alg.step(states[v], rnd, inboxes[v], make_coins(ids[v], rnd))
            states[v] = state
            for port, msg in outbox.items():
                nxt[adj[v][port]][back[v][port]] = msg
            if out is not None:
                outputs[v] = out
                rounds[v] = rnd
                pending -= 1
        inboxes = nxt
        rnd += 1
    return RunResult(tuple(outputs), tuple(rounds), g.names)  # type: ignore[arg-type]


# -- Monte Carlo ---------------------------------------------------------------


def wilson_interval(successes: int, trials: int, z: float = Z99) -> tuple[float, float]:
    if trials < 1:
        raise ValueError("trials must be positive")
    p = successes / trials
    denom = 1 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class ProbabilityEstimate:
    trials: int
    accept_count: int
    point: float
    interval: tuple[float, float]

    @classmethod
    def from_counts(cls, accept_count: int, trials: int) -> ProbabilityEstimate:
        lo, hi = wilson_interval(accept_count, trials)
        point = accept_count / trials
        return cls(trials, accept_count, point, (min(lo, point), max(hi, point)))

    def contains(self, value: float) -> bool:
        return self.interval[0] <= value <= self.interval[1]

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "accept_count": self.accept_count,
            "point": self.point,
            "interval": list(self.interval),
        }


def _count_accepts(alg, config, ids, certificate, seed, start, stop, round_cap) -> int:
    accepted = 0
    for i in range(start, stop):
        result = run(alg, config, ids, certificate, derive_seed(seed, i), round_cap)
        accepted += result.verdict == ACCEPT
    return accepted


def estimate_acceptance(
    alg: NodeAlgorithm,
    config: Configuration,
    ids: IdAssignment,
    certificate: CertificateLike = None,
    trials: int = 10_000,
    seed: int = 0,
    workers: int = 1,
    round_cap: int | None = None,
) -> ProbabilityEstimate:
    """Acceptance frequency over independent runs with a 99% Wilson interval.

    Trial ``i`` uses seed ``derive_seed(seed, i)``; the count, and hence the
    result, is identical for any number of ``workers``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if workers <= 1:
        count = _count_accepts(alg, config, ids, certificate, seed, 0, trials, round_cap)
    else:
        bounds = [trials * k // workers for k in range(workers + 1)]
        with ProcessPoolExecutor(workers) as pool:
            futures = [
                pool.submit(_count_accepts, alg, config, ids, certificate, seed, a, b, round_cap)
                for a, b in zip(bounds, bounds[1:])
            ]
            count = sum(f.result() for f in futures)
    return ProbabilityEstimate.from_counts(count, trials)
