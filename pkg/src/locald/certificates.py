"""Certificates and the verifiers that consume them.

* Tree: each node holds its distance to a root; a one-round check of the
  distance layering accepts exactly on trees.
* Universal map scheme: each node holds a labelled copy of the whole
  configuration plus its own label; label-1 nodes flip a ``p``-coin, so a
  lift with duplicated certificates is rejected with probability
  ``1 - p**2``.
* Containment: candidate configuration, candidate set, candidate identity
  and candidate leader, checked against the closed neighbourhood.
* InpEqSize: a claimed size plus a BFS layering.  Complete, and provably
  not sound at constant radius; :func:`inpeqsize_fooling` exhibits the
  duplication attack.

All wire formats are tagged records of length-prefixed fields (see
:mod:`locald.bits`).
"""

from __future__ import annotations

import itertools
import random
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import lru_cache

from .bits import (
    TAG_CONFIG,
    TAG_CONTAINMENT_CERT,
    TAG_INPEQSIZE_CERT,
    TAG_MAP_CERT,
    bits_to_int,
    decode_fields,
    decode_ints,
    decode_record,
    encode_fields,
    encode_ints,
    encode_pair,
    encode_record,
    int_to_bits,
)
from .cover import CoverInput
from .errors import (
    CodecError,
    GraphError,
    MalformedInput,
    NoAcceptingCertificateFound,
    NotInLanguage,
    SearchSpaceTooLarge,
    Unsupported,
)
from .graph import Configuration, Graph, IdAssignment, cycle_graph, round_view, views_isomorphic
from .languages import INPEQSIZE, TREE, Language
from .reports import FoolingReport, Instance
from .runtime import NO, YES, NodeAlgorithm, OneRound, run

DEFAULT_MAX_SPACE = 2_000_000


@dataclass(frozen=True)
class Certificate:
    """One bitstring per node handle."""

    values: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, v: int) -> str:
        return self.values[v]

    def to_json(self, config: Configuration) -> dict[str, str]:
        return dict(zip(config.graph.names, self.values))


# -- labelled configurations ---------------------------------------------------


def _encode_graph(graph: Graph) -> str:
    return encode_fields([int_to_bits(graph.n), encode_fields(encode_ints(e) for e in graph.edges())])


def _decode_graph(s: str) -> Graph:
    fields = decode_fields(s)
    if len(fields) != 2:
        raise CodecError("malformed graph field")
    n = bits_to_int(fields[0])
    if n < 1:
        raise CodecError("empty graph")
    edges = []
    for chunk in decode_fields(fields[1]):
        pair = decode_ints(chunk)
        if len(pair) != 2 or not all(0 <= x < n for x in pair):
            raise CodecError("malformed edge")
        edges.append((pair[0], pair[1]))
    try:
        return Graph.from_edges(n, edges)
    except GraphError as exc:
        raise CodecError(str(exc)) from None


def encode_configuration(config: Configuration, ids: IdAssignment | None = None) -> str:
    """Configuration (and optional identities) as a record; node ``i`` is handle ``i``."""
    fields = [_encode_graph(config.graph), encode_fields(config.inputs)]
    if ids is not None:
        fields.append(encode_ints(ids.ids))
    return encode_record(TAG_CONFIG, fields)


def decode_configuration(s: str) -> tuple[Configuration, IdAssignment | None]:
    fields = decode_record(s, TAG_CONFIG)
    if len(fields) not in (2, 3):
        raise CodecError("configuration record needs 2 or 3 fields")
    graph = _decode_graph(fields[0])
    inputs = decode_fields(fields[1])
    if len(inputs) != graph.n:
        raise CodecError("input vector length differs from node count")
    ids = None
    if len(fields) == 3:
        try:
            ids = IdAssignment(tuple(decode_ints(fields[2])))
        except GraphError as exc:
            raise CodecError(str(exc)) from None
        if len(ids) != graph.n:
            raise CodecError("id vector length differs from node count")
    return Configuration(graph, tuple(inputs)), ids


# -- tree scheme ---------------------------------------------------------------


def tree_certify(config: Configuration, ids: IdAssignment | None = None, root: int | None = None) -> Certificate:
    """Distances to a root in minimal binary.

    The root is ``root`` if given, else the node with the smallest identity
    when ``ids`` is given, else node handle 0.
    """
    if not TREE.member(config):
        raise NotInLanguage("configuration is not a tree")
    if root is None:
        root = min(config.graph.nodes, key=lambda v: ids[v]) if ids is not None else 0
    config.graph.check_node(root)
    return Certificate(tuple(int_to_bits(d) for d in config.graph.distances[root]))


def _parse_int(s: str | None) -> int | None:
    if s is None:
        return None
    try:
        return bits_to_int(s)
    except CodecError:
        return None


class TreeVerifier(OneRound):
    """One round: the certificate must be a consistent distance layering."""

    name = "tree-verifier"
    uses_certificate = True

    def announce(self, me):
        return me.certificate

    def judge(self, me, received, coins):
        if me.node_input != "":
            return NO
        y = _parse_int(me.certificate)
        if y is None:
            return NO
        nbrs = [_parse_int(c) for c in received]
        if any(z is None for z in nbrs):
            return NO
        if y == 0:
            return YES if all(z == 1 for z in nbrs) else NO
        down = sum(z == y - 1 for z in nbrs)
        up = sum(z == y + 1 for z in nbrs)
        return YES if down == 1 and up == len(nbrs) - 1 else NO


def tree_verifier() -> TreeVerifier:
    return TreeVerifier()


# -- universal map scheme ------------------------------------------------------


@dataclass(frozen=True)
class MapCertificate:
    """Labelled copy of the configuration; label ``i`` is map node ``i - 1``."""

    map_graph: Graph
    map_inputs: tuple[str, ...]
    own_label: int

    def __post_init__(self):
        if len(self.map_inputs) != self.map_graph.n:
            raise CodecError("map inputs must cover every label")
        if not 1 <= self.own_label <= self.map_graph.n:
            raise CodecError(f"label {self.own_label} outside 1..{self.map_graph.n}")

    def map_config(self) -> Configuration:
        return Configuration(self.map_graph, self.map_inputs)

    def neighbour_labels(self) -> set[int]:
        return {w + 1 for w in self.map_graph.neighbors(self.own_label - 1)}

    def encode(self) -> str:
        return encode_record(
            TAG_MAP_CERT, [_encode_graph(self.map_graph), encode_fields(self.map_inputs), int_to_bits(self.own_label)]
        )

    @classmethod
    def decode(cls, s: str) -> MapCertificate:
        g, xs, label = decode_record(s, TAG_MAP_CERT, 3)
        graph = _decode_graph(g)
        return cls(graph, tuple(decode_fields(xs)), bits_to_int(label))


def universal_certify(config: Configuration, ids: IdAssignment) -> Certificate:
    """Map certificates with labels ``1..n`` assigned by ascending identity."""
    g = config.graph
    order = sorted(g.nodes, key=lambda v: ids[v])
    label = {v: k + 1 for k, v in enumerate(order)}
    map_graph = Graph.from_edges(g.n, [(label[a] - 1, label[b] - 1) for a, b in g.edges()])
    map_inputs = tuple(config.inputs[v] for v in order)
    return Certificate(tuple(MapCertificate(map_graph, map_inputs, label[v]).encode() for v in g.nodes))


@lru_cache(maxsize=65536)
def _decode_map(s: str) -> MapCertificate | None:
    try:
        return MapCertificate.decode(s)
    except CodecError:
        return None


class UniversalBPNLDDecider(OneRound):
    """Checks the map locally, then label-1 nodes say yes with probability ``p``."""

    name = "universal"
    uses_certificate = True
    randomized = True

    def __init__(self, lang: Language, p: float):
        if not 0 < p <= 1:
            raise ValueError("p must lie in (0, 1]")
        self.lang = lang
        self.p = float(p)
        self._members: dict[str, bool] = {}

    def announce(self, me):
        cert = _decode_map(me.certificate) if me.certificate is not None else None
        if cert is None:
            return None
        # Neighbours compare the shared part and learn the sender's label.
        return (cert.map_graph, cert.map_inputs, cert.own_label)

    def _member(self, key: str, cert: MapCertificate) -> bool:
        # Keyed by the raw certificate: Monte Carlo runs repeat it constantly.
        if key not in self._members:
            try:
                self._members[key] = self.lang.member(cert.map_config())
            except (MalformedInput, Unsupported):
                self._members[key] = False
        return self._members[key]

    def judge(self, me, received, coins):
        cert = _decode_map(me.certificate) if me.certificate is not None else None
        if cert is None or cert.map_inputs[cert.own_label - 1] != me.node_input:
            return NO
        labels = []
        for msg in received:
            if msg is None or msg[0] != cert.map_graph or msg[1] != cert.map_inputs:
                return NO
            labels.append(msg[2])
        if len(set(labels)) != len(labels) or set(labels) != cert.neighbour_labels():
            return NO
        if not self._member(me.certificate, cert):
            return NO
        if cert.own_label != 1:
            return YES
        return YES if coins.bernoulli(self.p) else NO


def universal_bpnld_decider(lang: Language, p: float) -> UniversalBPNLDDecider:
    return UniversalBPNLDDecider(lang, p)


@dataclass(frozen=True)
class DoubleCover:
    """A connected 2-lift: lifted node ``v`` and ``v + n`` both project to ``v``."""

    config: Configuration
    projection: tuple[int, ...]

    def lift_certificate(self, certificate: Sequence[str]) -> Certificate:
        return Certificate(tuple(certificate[u] for u in self.projection))

    def lift_ids(self, ids: IdAssignment) -> IdAssignment:
        """Distinct identities: copy ``k`` of node ``v`` gets ``2 * ids[v] - 1 + k``."""
        n = len(ids)
        return IdAssignment(tuple(2 * ids[u] - 1 + (w >= n) for w, u in enumerate(self.projection)))


def double_cover(config: Configuration) -> DoubleCover:
    """Canonical 2-lift: BFS-tree edges stay parallel, the first other edge crosses.

    A tree has no connected 2-lift, so trees raise :class:`Unsupported`.
    """
    g = config.graph
    n = g.n
    parent = {0: None}
    frontier = [0]
    tree_edges = set()
    while frontier:
        nxt = []
        for u in frontier:
            for w in g.neighbors(u):
                if w not in parent:
                    parent[w] = u
                    tree_edges.add((min(u, w), max(u, w)))
                    nxt.append(w)
        frontier = nxt
    others = [e for e in g.edges() if e not in tree_edges]
    if not others:
        raise Unsupported("a tree has no connected double cover")
    crossed = others[0]
    edges = []
    for a, b in g.edges():
        if (a, b) == crossed:
            edges += [(a, b + n), (a + n, b)]
        else:
            edges += [(a, b), (a + n, b + n)]
    names = [f"{x}" for x in g.names] + [f"{x}'" for x in g.names]
    lifted = Graph.from_edges(2 * n, edges, names)
    return DoubleCover(Configuration(lifted, config.inputs * 2), tuple(range(n)) * 2)


# -- containment scheme --------------------------------------------------------


@dataclass(frozen=True)
class ContainmentCertificate:
    candidate_config: Configuration
    candidate_ids: IdAssignment
    candidate_set: frozenset[str]
    candidate_id: int
    candidate_leader: int

    def __post_init__(self):
        if len(self.candidate_ids) != self.candidate_config.n:
            raise CodecError("candidate ids must cover the candidate graph")
        if self.candidate_id not in self.candidate_ids.ids:
            raise CodecError("candidate identity does not occur in the candidate")

    def shared(self) -> str:
        """Encoding of the fields every node must agree on."""
        return encode_fields(
            [
                encode_configuration(self.candidate_config, self.candidate_ids),
                encode_fields(sorted(self.candidate_set)),
                int_to_bits(self.candidate_leader),
            ]
        )

    def encode(self) -> str:
        return encode_record(
            TAG_CONTAINMENT_CERT,
            [
                encode_configuration(self.candidate_config, self.candidate_ids),
                encode_fields(sorted(self.candidate_set)),
                int_to_bits(self.candidate_id),
                int_to_bits(self.candidate_leader),
            ],
        )

    @classmethod
    def decode(cls, s: str) -> ContainmentCertificate:
        cfg, cset, cid, leader = decode_record(s, TAG_CONTAINMENT_CERT, 4)
        config, ids = decode_configuration(cfg)
        if ids is None:
            raise CodecError("candidate configuration lacks identities")
        return cls(config, ids, frozenset(decode_fields(cset)), bits_to_int(cid), bits_to_int(leader))


def containment_certify(config: Configuration) -> Certificate:
    """Honest certificate for a ``containment`` member.

    The candidate is the configuration itself with identities ``1..n`` by
    node handle, so the certificate does not depend on the real identities.
    """
    from .cover import parse_cover_inputs

    parsed = parse_cover_inputs(config)
    elements = frozenset(c.element for c in parsed)
    for leader, c in enumerate(parsed):
        found = c.family.find_superset(elements)
        if found is not None:
            break
    else:
        raise NotInLanguage("no node holds a set containing every element")
    cand_ids = IdAssignment.sequential(config.n)
    return Certificate(
        tuple(
            ContainmentCertificate(config, cand_ids, found, cand_ids[v], cand_ids[leader]).encode()
            for v in config.graph.nodes
        )
    )


@lru_cache(maxsize=4096)
def _decode_containment(s: str) -> ContainmentCertificate | None:
    try:
        return ContainmentCertificate.decode(s)
    except CodecError:
        return None


@lru_cache(maxsize=4096)
def _decode_cover_input(s: str) -> CoverInput | None:
    try:
        return CoverInput.decode(s)
    except MalformedInput:
        return None


class ContainmentVerifier(OneRound):
    """Neighbourhood agreement with a shared candidate configuration.

    Checked at ``v``: agreement with every neighbour on the candidate
    configuration, set and leader; ``E(v)`` in the candidate set; the
    leader and ``v``'s own candidate identity exist in the candidate; the
    leader's family holds the candidate set; ``v``'s input equals the
    candidate's input at its image; and the neighbours' candidate identities
    are exactly the identities adjacent to that image.
    """

    name = "containment-verifier"
    uses_certificate = True

    def announce(self, me):
        cert = _decode_containment(me.certificate) if me.certificate is not None else None
        return None if cert is None else (cert.shared(), cert.candidate_id)

    def judge(self, me, received, coins):
        cert = _decode_containment(me.certificate) if me.certificate is not None else None
        own = _decode_cover_input(me.node_input)
        if cert is None or own is None:
            return NO
        shared = cert.shared()
        nbr_ids = []
        for msg in received:
            if msg is None or msg[0] != shared:
                return NO
            nbr_ids.append(msg[1])
        if own.element not in cert.candidate_set:
            return NO
        cand, cids = cert.candidate_config, cert.candidate_ids
        if cert.candidate_leader not in cids.ids:
            return NO
        leader_input = _decode_cover_input(cand.inputs[cids.node_of(cert.candidate_leader)])
        if leader_input is None or not leader_input.family.contains(cert.candidate_set):
            return NO
        image = cids.node_of(cert.candidate_id)
        if cand.inputs[image] != me.node_input:
            return NO
        expected = sorted(cids[w] for w in cand.graph.neighbors(image))
        return YES if sorted(nbr_ids) == expected else NO


def containment_verifier() -> ContainmentVerifier:
    return ContainmentVerifier()


# -- InpEqSize scheme ----------------------------------------------------------


def encode_inpeqsize_certificate(size: int, depth: int) -> str:
    return encode_record(TAG_INPEQSIZE_CERT, [int_to_bits(size), int_to_bits(depth)])


def decode_inpeqsize_certificate(s: str) -> tuple[int, int]:
    size, depth = decode_record(s, TAG_INPEQSIZE_CERT, 2)
    return bits_to_int(size), bits_to_int(depth)


def inpeqsize_certify(config: Configuration, root: int = 0) -> Certificate:
    """Claimed size ``n`` and BFS depth from ``root`` at every node."""
    if not INPEQSIZE.member(config):
        raise NotInLanguage("inputs do not all equal the node count")
    dist = config.graph.distances[root]
    return Certificate(tuple(encode_inpeqsize_certificate(config.n, d) for d in dist))


def inpeqsize_certificate_space(size: int) -> list[str]:
    """Every certificate value an honest prover could hand out on ``size`` nodes."""
    return [encode_inpeqsize_certificate(size, d) for d in range(size)]


def _parse_inpeqsize(s: str | None) -> tuple[int, int] | None:
    if s is None:
        return None
    try:
        return decode_inpeqsize_certificate(s)
    except CodecError:
        return None


class InpEqSizeVerifier(OneRound):
    """One round: agree on the claimed size, match it, and layer consistently.

    Rules at ``v`` with certificate ``(k, d)``: the input is ``k`` in binary,
    every neighbour claims ``k`` too, ``d < k``, neighbours' depths differ
    from ``d`` by at most one, a node with ``d = 0`` sees only depth 1, and a
    node with ``d > 0`` has a neighbour at depth ``d - 1``.  Complete on every member; no radius-1 rule can also be
    sound, which :func:`inpeqsize_fooling` demonstrates.
    """

    name = "inpeqsize-verifier"
    uses_certificate = True

    def announce(self, me):
        return me.certificate

    def judge(self, me, received, coins):
        cert = _parse_inpeqsize(me.certificate)
        if cert is None:
            return NO
        k, d = cert
        if me.node_input != int_to_bits(k) or d >= k:
            return NO
        nbrs = [_parse_inpeqsize(c) for c in received]
        if any(c is None or c[0] != k or abs(c[1] - d) > 1 for c in nbrs):
            return NO
        if d == 0 and any(c[1] != 1 for c in nbrs):
            return NO
        if d > 0 and not any(c[1] == d - 1 for c in nbrs):
            return NO
        return YES


def inpeqsize_verifier() -> InpEqSizeVerifier:
    return InpEqSizeVerifier()


# -- search and fooling --------------------------------------------------------


def integer_certificates(hi: int) -> list[str]:
    """Values ``0..hi`` in minimal binary."""
    return [int_to_bits(k) for k in range(hi + 1)]


def adversarial_certificate_search(
    verifier: NodeAlgorithm,
    config: Configuration,
    ids: IdAssignment | Iterable[IdAssignment],
    values: Sequence[str],
    max_space: int = DEFAULT_MAX_SPACE,
    seed: int = 0,
) -> Certificate | None:
    """First certificate (lexicographic over ``values``) accepted everywhere.

    ``ids`` may be one assignment or several; a certificate qualifies only if
    the verifier accepts under all of them.
    """
    assignments = [ids] if isinstance(ids, IdAssignment) else list(ids)
    if not assignments:
        raise ValueError("need at least one id assignment")
    space = len(values) ** config.n
    if space > max_space:
        raise SearchSpaceTooLarge(f"{len(values)}^{config.n} = {space} certificates exceeds {max_space}")
    for combo in itertools.product(values, repeat=config.n):
        if all(run(verifier, config, a, combo, seed=seed).accepted for a in assignments):
            return Certificate(combo)
    return None


def fooling_id_assignments(n: int, seed: int, count: int = 3) -> list[IdAssignment]:
    """Ascending, descending and ``count - 2`` seeded shuffles of ``1..n``."""
    base = list(range(1, n + 1))
    out = [IdAssignment(tuple(base)), IdAssignment(tuple(reversed(base)))]
    rng = random.Random(seed)
    for _ in range(max(count - 2, 0)):
        perm = base[:]
        rng.shuffle(perm)
        out.append(IdAssignment(tuple(perm)))
    return out


def inpeqsize_fooling(
    verifier: NodeAlgorithm,
    t: int,
    seed: int = 0,
    values: Sequence[str] | None = None,
    max_space: int = DEFAULT_MAX_SPACE,
) -> FoolingReport:
    """Certificate duplication on a cycle of twice the size.

    ``C`` has ``2t + 1`` nodes, all with input ``2t + 1``.  An accepting
    certificate ``y`` for ``C`` is copied around ``C'`` of ``4t + 2`` nodes
    with the same inputs, so ``v_i`` and ``v_{i + 2t + 1}`` both carry
    ``y(u_i)``.  What ``v_i`` can learn in ``t`` rounds then matches what
    ``u_i`` learns, up to identities (see :func:`locald.graph.round_view`).
    """
    if t < 1:
        raise ValueError("t must be at least 1")
    small = 2 * t + 1
    label = int_to_bits(small)
    c = Configuration.uniform(cycle_graph(small), label)
    big = Configuration.uniform(cycle_graph(2 * small), label)
    values = inpeqsize_certificate_space(small) if values is None else values
    assignments = fooling_id_assignments(small, seed)
    y = adversarial_certificate_search(verifier, c, assignments, values, max_space, seed)
    if y is None:
        raise NoAcceptingCertificateFound("the verifier rejects the member cycle under every bounded certificate")
    y2 = Certificate(y.values * 2)
    rng = random.Random(seed)
    fresh = list(range(1, 2 * small + 1))
    rng.shuffle(fresh)
    big_ids = IdAssignment(tuple(fresh))
    result = run(verifier, big, big_ids, y2.values, seed=seed)
    member_result = run(verifier, c, assignments[0], y.values, seed=seed)
    # Views with certificates folded into the inputs, compared without ids.
    c_cert = _with_certificates(c, y.values)
    big_cert = _with_certificates(big, y2.values)
    indist = all(
        views_isomorphic(
            round_view(big_cert, big_ids, v, t), round_view(c_cert, assignments[0], v % small, t), cap=2 * small
        )
        for v in big.graph.nodes
    )
    return FoolingReport(
        construction="inpeqsize-duplication",
        member_instance=Instance(c, assignments[0], member_result.outputs),
        nonmember_instance=Instance(big, big_ids, result.outputs),
        witness=y2,
        fooled=result.accepted and not INPEQSIZE.member(big),
        details={"t": t, "member_certificate": list(y.values), "views_indistinguishable": indist},
    )


def _with_certificates(config: Configuration, certificate: Sequence[str]) -> Configuration:
    return config.with_inputs(encode_pair(x, y) for x, y in zip(config.inputs, certificate))
