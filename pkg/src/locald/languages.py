"""Centralized membership oracles for distributed languages.

Oracles never see identities: a language is a set of configurations.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .bits import bits_to_int, decode_pair, int_to_bits
from .errors import CodecError, GraphTooLarge, MalformedInput, Unsupported
from .graph import Configuration, Graph, all_configurations, connected_subsets, prefix


@dataclass(frozen=True)
class Language:
    name: str
    predicate: Callable[[Configuration], bool] = field(repr=False)
    hereditary_hint: bool = False
    alphabet: tuple[str, ...] = ()
    # Vectorised membership over many input vectors for one graph: rows of
    # ``inputs`` are configurations.  Optional.
    batch: Callable[[Graph, np.ndarray], np.ndarray] | None = field(default=None, repr=False, compare=False)

    def member(self, config: Configuration) -> bool:
        return self.predicate(config)

    def member_batch(self, graph: Graph, inputs: np.ndarray) -> np.ndarray:
        if self.batch is not None:
            return self.batch(graph, inputs)
        return np.array([self.member(Configuration(graph, tuple(row))) for row in inputs], dtype=bool)


def member(lang: Language, config: Configuration) -> bool:
    return lang.member(config)


def _bits01(config: Configuration) -> list[int]:
    out = []
    for x in config.inputs:
        if x not in ("0", "1"):
            raise MalformedInput(f"expected a single bit, got {x!r}")
        out.append(int(x))
    return out


def _unique_leader(config: Configuration) -> bool:
    return sum(_bits01(config)) <= 1


def _unique_leader_exact(config: Configuration) -> bool:
    return sum(_bits01(config)) == 1


def _coloring(config: Configuration) -> bool:
    x = config.inputs
    return all(x[a] != x[b] for a, b in config.graph.edges())


def _coloring_batch(graph: Graph, inputs: np.ndarray) -> np.ndarray:
    ok = np.ones(len(inputs), dtype=bool)
    for a, b in graph.edges():
        ok &= inputs[:, a] != inputs[:, b]
    return ok


def _mis(config: Configuration) -> bool:
    s = _bits01(config)
    g = config.graph
    for v in g.nodes:
        in_nbrs = any(s[w] for w in g.neighbors(v))
        if s[v] and in_nbrs:
            return False
        if not s[v] and not in_nbrs:
            return False
    return True


def _pairs(config: Configuration) -> list[tuple[str, str]]:
    try:
        return [decode_pair(x) for x in config.inputs]
    except CodecError as exc:
        raise MalformedInput(str(exc)) from None


def _consensus(config: Configuration) -> bool:
    pairs = _pairs(config)
    decided = {x2 for _, x2 in pairs}
    if len(decided) != 1:
        return False
    return decided.pop() in {x1 for x1, _ in pairs}


def spanning_tree_edges(config: Configuration) -> set[tuple[int, int]]:
    """Edges ``{v, w}`` where ``w`` is a neighbour of ``v`` named ``head(v)``."""
    pairs = _pairs(config)
    g = config.graph
    edges = set()
    for v in g.nodes:
        head = pairs[v][1]
        for w in g.neighbors(v):
            if pairs[w][0] == head:
                edges.add((min(v, w), max(v, w)))
    return edges


def _spanning_tree(config: Configuration) -> bool:
    edges = spanning_tree_edges(config)
    n = config.n
    if len(edges) != n - 1:
        return False
    try:
        Graph.from_edges(n, edges)
    except Exception:
        return False
    return True


def _empty_inputs(config: Configuration) -> None:
    if any(config.inputs):
        raise MalformedInput("language expects empty inputs")


def _tree(config: Configuration) -> bool:
    _empty_inputs(config)
    return config.graph.m == config.n - 1


def _inpeqsize(config: Configuration) -> bool:
    for x in config.inputs:
        try:
            bits_to_int(x)
        except CodecError:
            raise MalformedInput(f"expected a binary integer, got {x!r}") from None
    target = int_to_bits(config.n)
    return all(x == target for x in config.inputs)


def _unsupported(name: str) -> Callable[[Configuration], bool]:
    def predicate(config: Configuration) -> bool:
        raise Unsupported(f"membership for {name} is not implemented")

    return predicate


def _cover(config: Configuration) -> bool:
    from .cover import member_cover

    return member_cover(config)


def _containment(config: Configuration) -> bool:
    from .cover import member_containment

    return member_containment(config)


COLORS = ("0", "1", "10")

UNIQUE_LEADER = Language("unique-leader", _unique_leader, True, ("0", "1"))
UNIQUE_LEADER_EXACT = Language("unique-leader-exact", _unique_leader_exact, False, ("0", "1"))
COLORING = Language("coloring", _coloring, True, COLORS, _coloring_batch)
MIS = Language("mis", _mis, False, ("0", "1"))
CONSENSUS = Language("consensus", _consensus, False)
SPANNING_TREE = Language("spanning-tree", _spanning_tree, False)
TREE = Language("tree", _tree, True, ("",))
INPEQSIZE = Language("inpeqsize", _inpeqsize, False, tuple(int_to_bits(k) for k in range(1, 6)))
COVER = Language("cover", _cover, False)
CONTAINMENT = Language("containment", _containment, False)
PLANAR = Language("planar", _unsupported("planar"), True, ("",))
INTERVAL = Language("interval", _unsupported("interval"), True, ("",))

REGISTRY: dict[str, Language] = {
    lang.name: lang
    for lang in (
        UNIQUE_LEADER,
        UNIQUE_LEADER_EXACT,
        COLORING,
        MIS,
        CONSENSUS,
        SPANNING_TREE,
        TREE,
        INPEQSIZE,
        COVER,
        CONTAINMENT,
        PLANAR,
        INTERVAL,
    )
}
ALIASES = {"cycle-free": "tree", "#n": "inpeqsize", "leader": "unique-leader"}


def get(name: str) -> Language:
    key = ALIASES.get(name.lower(), name.lower())
    try:
        return REGISTRY[key]
    except KeyError:
        raise KeyError(f"unknown language {name!r}; known: {', '.join(sorted(REGISTRY))}") from None


@dataclass(frozen=True)
class HereditaryCounterexample:
    config: Configuration
    subset: frozenset[int]
    prefix: Configuration


def check_hereditary(
    lang: Language,
    node_cap: int = 6,
    alphabet: Sequence[str] | None = None,
    max_configs: int = 5_000_000,
) -> tuple[bool, HereditaryCounterexample | None]:
    """Check every connected prefix of every member configuration up to ``node_cap`` nodes.

    Returns ``(True, None)`` or ``(False, first counterexample)``.
    """
    alphabet = tuple(lang.alphabet if alphabet is None else alphabet)
    if not alphabet:
        raise ValueError(f"no input alphabet for {lang.name}")
    if node_cap > 8:
        raise GraphTooLarge("exhaustive graph enumeration is limited to 8 nodes")
    from .graph import connected_graphs

    total = sum(len(connected_graphs(n)) * len(alphabet) ** n for n in range(1, node_cap + 1))
    if total > max_configs:
        raise GraphTooLarge(f"{total} configurations exceeds budget {max_configs}")
    for config in all_configurations(node_cap, alphabet):
        if not lang.member(config):
            continue
        for subset in connected_subsets(config.graph):
            sub = prefix(config, subset)
            if not lang.member(sub):
                return False, HereditaryCounterexample(config, subset, sub)
    return True, None
