"""Graphs, configurations, identity assignments and local views.

Node handles are the indices ``0..n-1`` of a :class:`Graph`.  They are not
identities: the same :class:`Configuration` can be run under any number of
:class:`IdAssignment` objects.
"""

from __future__ import annotations

import itertools
from collections import deque
from collections.abc import Collection, Hashable, Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

from .bits import (
    TAG_VIEW,
    bits_to_int,
    check_bitstring,
    decode_fields,
    decode_record,
    encode_fields,
    encode_ints,
    encode_record,
    int_to_bits,
)
from .errors import (
    CodecError,
    DisconnectedGraph,
    DisconnectedPrefix,
    DuplicateEdge,
    GraphError,
    GraphTooLarge,
    SelfLoop,
    UnknownNode,
    ViewTooLarge,
)

INF = float("inf")

DEFAULT_VIEW_CAP = 10
DEFAULT_SPLITTER_CAP = 8


@dataclass(frozen=True)
class Graph:
    """Simple connected undirected graph over node handles ``0..n-1``."""

    adjacency: tuple[tuple[int, ...], ...]
    names: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        n = len(self.adjacency)
        if n == 0:
            raise GraphError("a graph needs at least one node")
        if not self.names:
            object.__setattr__(self, "names", tuple(str(i) for i in range(n)))
        if len(self.names) != n or len(set(self.names)) != n:
            raise GraphError("node names must be distinct, one per node")
        for v, nbrs in enumerate(self.adjacency):
            if v in nbrs:
                raise SelfLoop(f"self-loop at {self.names[v]}")
            if len(set(nbrs)) != len(nbrs):
                raise DuplicateEdge(f"duplicate edge at {self.names[v]}")
            for w in nbrs:
                if not 0 <= w < n or v not in self.adjacency[w]:
                    raise GraphError(f"asymmetric adjacency between {v} and {w}")
        if n > 1 and -1 in self._bfs(0):
            raise DisconnectedGraph("graph is not connected")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], names: Sequence[str] = ()) -> Graph:
        adj: list[set[int]] = [set() for _ in range(n)]
        for a, b in edges:
            if a == b:
                raise SelfLoop(f"self-loop at {a}")
            if not (0 <= a < n and 0 <= b < n):
                raise UnknownNode(f"edge ({a}, {b}) references a missing node")
            if b in adj[a]:
                raise DuplicateEdge(f"duplicate edge ({a}, {b})")
            adj[a].add(b)
            adj[b].add(a)
        return cls(tuple(tuple(sorted(s)) for s in adj), tuple(names))

    @property
    def n(self) -> int:
        return len(self.adjacency)

    @property
    def nodes(self) -> range:
        return range(self.n)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def edges(self) -> list[tuple[int, int]]:
        return [(v, w) for v in self.nodes for w in self.adjacency[v] if v < w]

    @property
    def m(self) -> int:
        return sum(map(len, self.adjacency)) // 2

    def has_edge(self, a: int, b: int) -> bool:
        return b in self.adjacency[a]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownNode(f"no node named {name!r}") from None

    def _bfs(self, source: int) -> list[int]:
        dist = [-1] * len(self.adjacency)
        dist[source] = 0
        queue = deque([source])
        while queue:
            v = queue.popleft()
            for w in self.adjacency[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
        return dist

    @cached_property
    def distances(self) -> tuple[tuple[int, ...], ...]:
        """All-pairs hop distances."""
        return tuple(tuple(self._bfs(v)) for v in self.nodes)

    def dist(self, a: int, b: int) -> int:
        return self.distances[a][b]

    def set_distance(self, a: Collection[int], b: Collection[int]) -> float:
        if not a or not b:
            return INF
        return min(self.distances[u][v] for u in a for v in b)

    def eccentricity(self, v: int) -> int:
        return max(self.distances[v])

    @property
    def diameter(self) -> int:
        return max(max(row) for row in self.distances)

    def check_node(self, v: int) -> int:
        if not isinstance(v, int) or not 0 <= v < self.n:
            raise UnknownNode(f"unknown node {v!r}")
        return v

    def is_connected_subset(self, nodes: Collection[int]) -> bool:
        nodes = set(nodes)
        if not nodes:
            return False
        start = next(iter(nodes))
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for w in self.adjacency[v]:
                if w in nodes and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(nodes)

    def induced(self, nodes: Iterable[int]) -> tuple[Graph, tuple[int, ...]]:
        """Induced subgraph on ``nodes`` plus the handle map new -> old.

        Raises :class:`DisconnectedGraph` when the induced subgraph is not
        connected.
        """
        order = tuple(sorted(set(nodes)))
        pos = {v: i for i, v in enumerate(order)}
        adj = tuple(tuple(sorted(pos[w] for w in self.adjacency[v] if w in pos)) for v in order)
        return Graph(adj, tuple(self.names[v] for v in order)), order

    def relabel(self, names: Sequence[str]) -> Graph:
        return Graph(self.adjacency, tuple(names))


def build_graph(edge_list: Iterable[tuple[Hashable, Hashable]], nodes: Iterable[Hashable] = ()) -> Graph:
    """Build a validated graph from named edges.

    Isolated nodes can only be declared through ``nodes``, which is how a
    single-node graph is built.  Node order is the order of first appearance.
    """
    order: dict[Hashable, int] = {}
    for v in nodes:
        order.setdefault(v, len(order))
    pairs = []
    for a, b in edge_list:
        order.setdefault(a, len(order))
        order.setdefault(b, len(order))
        pairs.append((order[a], order[b]))
    if not order:
        raise GraphError("empty edge list and no declared node")
    return Graph.from_edges(len(order), pairs, [str(v) for v in order])


@dataclass(frozen=True)
class Configuration:
    """A connected graph with one input bitstring per node."""

    graph: Graph
    inputs: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.inputs) != self.graph.n:
            raise GraphError("input must be defined for every node")
        for x in self.inputs:
            check_bitstring(x, "input")

    @classmethod
    def uniform(cls, graph: Graph, value: str = "") -> Configuration:
        return cls(graph, (value,) * graph.n)

    @property
    def n(self) -> int:
        return self.graph.n

    def with_inputs(self, inputs: Sequence[str]) -> Configuration:
        return Configuration(self.graph, tuple(inputs))


@dataclass(frozen=True)
class IdAssignment:
    """Distinct positive integer identities, one per node handle."""

    ids: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(not isinstance(i, int) or i < 1 for i in self.ids):
            raise GraphError("identities must be positive integers")
        if len(set(self.ids)) != len(self.ids):
            raise GraphError("identities must be pairwise distinct")

    @classmethod
    def sequential(cls, n: int, start: int = 1) -> IdAssignment:
        return cls(tuple(range(start, start + n)))

    def __getitem__(self, v: int) -> int:
        return self.ids[v]

    def __len__(self) -> int:
        return len(self.ids)

    def node_of(self, ident: int) -> int:
        return self.ids.index(ident)


def _check_ids(config: Configuration, ids: IdAssignment) -> None:
    if len(ids) != config.n:
        raise GraphError("id assignment does not match the graph size")


@dataclass(frozen=True)
class LocalView:
    """Ball of radius ``radius`` around ``center`` with inputs and identities.

    ``nodes[i]`` is the original handle of local node ``i``; the center is
    always local node 0.
    """

    center: int
    radius: int
    nodes: tuple[int, ...]
    subgraph: Graph
    inputs: tuple[str, ...]
    ids: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.nodes)

    def key(self) -> tuple:
        """Identity-keyed canonical form.

        Two views have equal keys exactly when a center-, input- and
        id-preserving isomorphism exists, since identities are distinct.
        """
        edges = frozenset(
            (min(self.ids[a], self.ids[b]), max(self.ids[a], self.ids[b])) for a, b in self.subgraph.edges()
        )
        labels = frozenset(zip(self.ids, self.inputs))
        return (self.radius, self.ids[0], labels, edges)

    def encode(self) -> str:
        """Canonical bitstring; equal exactly when :meth:`key` is equal."""
        radius, center, labels, edges = self.key()
        node_fields = [encode_fields([int_to_bits(i), x]) for i, x in sorted(labels)]
        edge_fields = [encode_ints(e) for e in sorted(edges)]
        return encode_record(
            TAG_VIEW,
            [int_to_bits(radius), int_to_bits(center), encode_fields(node_fields), encode_fields(edge_fields)],
        )


@dataclass(frozen=True)
class DecodedView:
    """A view reconstructed from its bitstring encoding (handles are lost)."""

    radius: int
    center_id: int
    labels: dict[int, str] = field(hash=False, compare=False)
    edges: frozenset[tuple[int, int]] = frozenset()


def decode_view(s: str) -> DecodedView:
    r, c, nodes, edges = decode_record(s, TAG_VIEW, 4)
    labels = {}
    for chunk in decode_fields(nodes):
        parts = decode_fields(chunk)
        if len(parts) != 2:
            raise CodecError("malformed view node")
        labels[bits_to_int(parts[0])] = parts[1]
    edge_set = set()
    for chunk in decode_fields(edges):
        parts = [bits_to_int(f) for f in decode_fields(chunk)]
        if len(parts) != 2 or parts[0] >= parts[1]:
            raise CodecError("malformed view edge")
        edge_set.add((parts[0], parts[1]))
    center = bits_to_int(c)
    if center not in labels or any(a not in labels or b not in labels for a, b in edge_set):
        raise CodecError("view references unknown identities")
    return DecodedView(bits_to_int(r), center, labels, frozenset(edge_set))


def ball_nodes(graph: Graph, v: int, t: int) -> list[int]:
    return [u for u in graph.nodes if graph.distances[v][u] <= t]


def ball(config: Configuration, ids: IdAssignment, v: int, t: int) -> LocalView:
    """Induced ball of radius ``t`` around ``v`` with inputs and identities."""
    g = config.graph
    g.check_node(v)
    if t < 0:
        raise GraphError("radius must be non-negative")
    _check_ids(config, ids)
    members = [v] + [u for u in ball_nodes(g, v, t) if u != v]
    pos = {u: i for i, u in enumerate(members)}
    adj = tuple(tuple(sorted(pos[w] for w in g.adjacency[u] if w in pos)) for u in members)
    sub = Graph(adj, tuple(g.names[u] for u in members))
    return LocalView(
        center=v,
        radius=t,
        nodes=tuple(members),
        subgraph=sub,
        inputs=tuple(config.inputs[u] for u in members),
        ids=tuple(ids[u] for u in members),
    )


def round_view(config: Configuration, ids: IdAssignment, v: int, t: int) -> LocalView:
    """What ``v`` can learn in ``t`` rounds: the radius-``t`` ball without the
    edges joining two nodes at distance exactly ``t`` (those are only seen
    one round later)."""
    view = ball(config, ids, v, t)
    dist = config.graph.distances[v]
    rim = {k for k, u in enumerate(view.nodes) if dist[u] == t}
    if t == 0 or not rim:
        return view
    adj = tuple(
        tuple(w for w in view.subgraph.adjacency[k] if not (k in rim and w in rim)) for k in range(view.size)
    )
    return LocalView(v, t, view.nodes, Graph(adj, view.subgraph.names), view.inputs, view.ids)


def prefix(config: Configuration, u: Iterable[int]) -> Configuration:
    """Restriction ``(G[U], x[U])``; node ``i`` of the result is ``sorted(U)[i]``."""
    nodes = sorted(set(u))
    for v in nodes:
        config.graph.check_node(v)
    if not nodes or not config.graph.is_connected_subset(nodes):
        raise DisconnectedPrefix(f"G[U] is not connected for U={nodes}")
    sub, order = config.graph.induced(nodes)
    return Configuration(sub, tuple(config.inputs[v] for v in order))


def restrict_ids(ids: IdAssignment, u: Iterable[int]) -> IdAssignment:
    return IdAssignment(tuple(ids[v] for v in sorted(set(u))))


def view_to_configuration(view: LocalView) -> Configuration:
    return Configuration(view.subgraph, view.inputs)


# -- isomorphism ---------------------------------------------------------------


def _signatures(view: LocalView, match_ids: bool) -> list[tuple]:
    g = view.subgraph
    sig = []
    for i in range(view.size):
        nbr_profile = tuple(sorted((g.degree(w), view.inputs[w]) for w in g.neighbors(i)))
        s = (i == 0, g.degree(i), view.inputs[i], nbr_profile)
        if match_ids:
            s += (view.ids[i],)
        sig.append(s)
    return sig


def views_isomorphic(v1: LocalView, v2: LocalView, match_ids: bool = False, cap: int = DEFAULT_VIEW_CAP) -> bool:
    """Center-, input- (and optionally id-) preserving isomorphism test.

    Backtracking search; candidates are pruned by a refined signature
    (degree, input, neighbour profile) before adjacency is checked.
    """
    for v in (v1, v2):
        if v.size > cap:
            raise ViewTooLarge(f"view with {v.size} nodes exceeds cap {cap}")
    if v1.size != v2.size or v1.subgraph.m != v2.subgraph.m:
        return False
    s1 = _signatures(v1, match_ids)
    s2 = _signatures(v2, match_ids)
    if sorted(s1) != sorted(s2):
        return False
    g1, g2 = v1.subgraph, v2.subgraph
    n = v1.size
    # Most constrained nodes first.
    counts: dict[tuple, int] = {}
    for s in s1:
        counts[s] = counts.get(s, 0) + 1
    order = sorted(range(n), key=lambda i: (counts[s1[i]], -g1.degree(i)))
    mapping: dict[int, int] = {}
    used: set[int] = set()

    def extend(k: int) -> bool:
        if k == n:
            return True
        a = order[k]
        for b in range(n):
            if b in used or s2[b] != s1[a]:
                continue
            if any(g1.has_edge(a, c) != g2.has_edge(b, mapping[c]) for c in mapping):
                continue
            mapping[a] = b
            used.add(b)
            if extend(k + 1):
                return True
            del mapping[a]
            used.discard(b)
        return False

    return extend(0)


# -- splitters -----------------------------------------------------------------


@dataclass(frozen=True)
class Splitter:
    s: frozenset[int]
    u1: frozenset[int]
    u2: frozenset[int]
    radius_bound: int

    def is_valid_for(self, graph: Graph) -> bool:
        parts = (self.s, self.u1, self.u2)
        disjoint = not (self.s & self.u1 or self.s & self.u2 or self.u1 & self.u2)
        covers = set().union(*parts) == set(graph.nodes)
        return disjoint and covers and graph.set_distance(self.u1, self.u2) >= self.radius_bound


def find_splitters(config: Configuration, radius_bound: int, cap: int = DEFAULT_SPLITTER_CAP) -> list[Splitter]:
    """Every tripartition ``(S, U1, U2)`` with ``dist(U1, U2) >= radius_bound``.

    Parts may be empty; the distance to an empty set is infinite.
    """
    g = config.graph
    if g.n > cap:
        raise GraphTooLarge(f"{g.n} nodes exceeds splitter enumeration cap {cap}")
    out = []
    for labels in itertools.product(range(3), repeat=g.n):
        parts: tuple[list[int], list[int], list[int]] = ([], [], [])
        for v, k in enumerate(labels):
            parts[k].append(v)
        if g.set_distance(parts[1], parts[2]) >= radius_bound:
            out.append(Splitter(frozenset(parts[0]), frozenset(parts[1]), frozenset(parts[2]), radius_bound))
    return out


# -- enumeration ---------------------------------------------------------------


def _from_nx(h) -> Graph:
    mapping = {v: i for i, v in enumerate(sorted(h.nodes()))}
    return Graph.from_edges(len(mapping), [(mapping[a], mapping[b]) for a, b in h.edges()])


_SHIPPED = {8: "connected8.g6"}


@lru_cache(maxsize=None)
def connected_graphs(n: int) -> tuple[Graph, ...]:
    """All connected graphs on ``n`` nodes, one per isomorphism class.

    ``n <= 7`` comes from the networkx atlas, ``n == 8`` from a shipped
    graph6 file produced by :func:`generate_connected_graphs`.
    """
    import networkx as nx

    if n < 1:
        return ()
    if n <= 7:
        return tuple(
            _from_nx(h) for h in nx.graph_atlas_g() if h.number_of_nodes() == n and nx.is_connected(h)
        )
    if n in _SHIPPED:
        from importlib.resources import files

        raw = files("locald.data").joinpath(_SHIPPED[n]).read_bytes()
        return tuple(_from_nx(nx.from_graph6_bytes(line)) for line in raw.split() if line)
    return generate_connected_graphs(n)


def generate_connected_graphs(n: int) -> tuple[Graph, ...]:
    """Isomorphism classes on ``n`` nodes by one-vertex extension of ``n - 1``.

    Every connected graph has a non-cut vertex, so each class is reached.
    """
    import networkx as nx

    buckets: dict[str, list] = {}
    for base in connected_graphs(n - 1):
        for mask in range(1, 1 << (n - 1)):
            h = nx.Graph()
            h.add_nodes_from(range(n))
            h.add_edges_from(base.edges())
            h.add_edges_from((n - 1, w) for w in range(n - 1) if mask >> w & 1)
            key = nx.weisfeiler_lehman_graph_hash(h, iterations=3)
            reps = buckets.setdefault(key, [])
            if not any(nx.is_isomorphic(h, r) for r in reps):
                reps.append(h)
    return tuple(_from_nx(h) for key in sorted(buckets) for h in buckets[key])


@lru_cache(maxsize=None)
def labeled_connected_graphs(n: int) -> tuple[Graph, ...]:
    """All connected graphs on the labeled node set ``0..n-1``."""
    pairs = list(itertools.combinations(range(n), 2))
    out = []
    for mask in range(1 << len(pairs)):
        chosen = [p for i, p in enumerate(pairs) if mask >> i & 1]
        if n > 1 and len(chosen) < n - 1:
            continue
        try:
            out.append(Graph.from_edges(n, chosen))
        except DisconnectedGraph:
            continue
    return tuple(out)


def trees(n: int) -> tuple[Graph, ...]:
    return tuple(g for g in connected_graphs(n) if g.m == n - 1)


def configurations(graph: Graph, alphabet: Sequence[str]) -> Iterator[Configuration]:
    for inputs in itertools.product(alphabet, repeat=graph.n):
        yield Configuration(graph, inputs)


def all_configurations(max_n: int, alphabet: Sequence[str], min_n: int = 1) -> Iterator[Configuration]:
    for n in range(min_n, max_n + 1):
        for g in connected_graphs(n):
            yield from configurations(g, alphabet)


def id_assignments(n: int, pool: Iterable[int]) -> Iterator[IdAssignment]:
    for perm in itertools.permutations(sorted(set(pool)), n):
        yield IdAssignment(perm)


def connected_subsets(graph: Graph, proper: bool = True) -> Iterator[frozenset[int]]:
    full = (1 << graph.n) - 1
    for mask in range(1, full + (0 if proper else 1)):
        nodes = frozenset(v for v in graph.nodes if mask >> v & 1)
        if graph.is_connected_subset(nodes):
            yield nodes


# -- common shapes -------------------------------------------------------------


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphError("a cycle needs at least 3 nodes")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, itertools.combinations(range(n), 2))


def ids_from_mapping(config: Configuration, ids: Mapping[int, int]) -> IdAssignment:
    return IdAssignment(tuple(ids[v] for v in config.graph.nodes))
