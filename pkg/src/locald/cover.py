"""Inputs of the ``cover`` and ``containment`` languages.

Each node holds an element (a bitstring) and a finite family of finite sets
of bitstrings.  Families come in two encodings with identical semantics:

* :class:`ExplicitFamily` lists every set.
* :class:`GeneratedFamily` names a language, a view radius and a bound
  ``psi``; it stands for the family with one set per configuration in the
  language with at most ``psi`` nodes, inputs of length at most ``psi`` and
  identities of at most ``psi`` bits, each set holding the radius-``radius``
  views of that configuration.  Membership queries on it are answered by
  reconstructing the configuration from the queried views, which is exact;
  :meth:`GeneratedFamily.materialize` lists the sets when that is feasible.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator
from dataclasses import dataclass

from .bits import (
    TAG_COVER_INPUT,
    TAG_FAMILY_EXPLICIT,
    TAG_FAMILY_GENERATED,
    all_bitstrings,
    bits_to_int,
    decode_fields,
    decode_record,
    encode_fields,
    encode_record,
    int_to_bits,
)
from .errors import CodecError, DisconnectedGraph, EnumerationTooLarge, MalformedInput
from .graph import (
    Configuration,
    DecodedView,
    Graph,
    IdAssignment,
    ball,
    connected_graphs,
    decode_view,
    labeled_connected_graphs,
)

DEFAULT_MATERIALIZE_LIMIT = 200_000


def text_to_bits(s: str) -> str:
    return "".join(format(b, "08b") for b in s.encode("utf-8"))


def bits_to_text(bits: str) -> str:
    if len(bits) % 8:
        raise CodecError("text field is not byte aligned")
    return bytes(int(bits[i : i + 8], 2) for i in range(0, len(bits), 8)).decode("utf-8")


def views_of(config: Configuration, ids: IdAssignment, radius: int) -> frozenset[str]:
    return frozenset(ball(config, ids, v, radius).encode() for v in config.graph.nodes)


class Family:
    def contains(self, s: frozenset[str]) -> bool:
        raise NotImplementedError

    def find_superset(self, s: frozenset[str]) -> frozenset[str] | None:
        """Some member set containing ``s``, or None."""
        raise NotImplementedError

    def contains_superset_of(self, s: frozenset[str]) -> bool:
        return self.find_superset(s) is not None

    def encode(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class ExplicitFamily(Family):
    sets: frozenset[frozenset[str]]

    @classmethod
    def of(cls, sets: Iterable[Iterable[str]]) -> ExplicitFamily:
        return cls(frozenset(frozenset(s) for s in sets))

    def contains(self, s):
        return frozenset(s) in self.sets

    def find_superset(self, s):
        s = frozenset(s)
        # Deterministic choice: the first match in canonical order.
        matches = [t for t in self.sets if s <= t]
        return min(matches, key=lambda t: sorted(t)) if matches else None

    def encode(self) -> str:
        # Canonical order makes equal families encode identically.
        chunks = sorted(encode_fields(sorted(t)) for t in self.sets)
        return encode_record(TAG_FAMILY_EXPLICIT, chunks)


@dataclass(frozen=True)
class GeneratedFamily(Family):
    language: str
    radius: int
    psi: int

    @property
    def max_id(self) -> int:
        return (1 << self.psi) - 1

    def _lang(self):
        from .languages import get

        return get(self.language)

    def encode(self) -> str:
        return encode_record(
            TAG_FAMILY_GENERATED, [text_to_bits(self.language), int_to_bits(self.radius), int_to_bits(self.psi)]
        )

    # -- queries --

    def _decode(self, s: Iterable[str]) -> list[DecodedView] | None:
        out = []
        for e in s:
            try:
                view = decode_view(e)
            except CodecError:
                return None
            if view.radius != self.radius:
                return None
            out.append(view)
        return out

    def _labels(self, views: list[DecodedView]) -> dict[int, str] | None:
        labels: dict[int, str] = {}
        for view in views:
            for ident, x in view.labels.items():
                if labels.setdefault(ident, x) != x:
                    return None
        if any(i > self.max_id for i in labels) or any(len(x) > self.psi for x in labels.values()):
            return None
        return labels

    def _check(self, order: list[int], labels: dict[int, str], edges: Iterable[tuple[int, int]]):
        """Configuration on ``order`` if it is valid and in the language."""
        pos = {i: k for k, i in enumerate(order)}
        try:
            g = Graph.from_edges(len(order), [(pos[a], pos[b]) for a, b in edges], [str(i) for i in order])
        except DisconnectedGraph:
            return None
        config = Configuration(g, tuple(labels[i] for i in order))
        try:
            ok = self._lang().member(config)
        except MalformedInput:
            ok = False
        return (config, IdAssignment(tuple(order))) if ok else None

    def contains(self, s) -> bool:
        views = self._decode(s)
        if not views:
            return False
        centers = [v.center_id for v in views]
        k = len(centers)
        if len(set(centers)) != k or k > self.psi:
            return False
        labels = self._labels(views)
        if labels is None or set(labels) != set(centers):
            return False
        order = sorted(centers)
        target = frozenset(s)
        if self.radius >= 1:
            # Every edge of the configuration lies in the view of its endpoints.
            edges = set().union(*(v.edges for v in views))
            candidates: Iterable = [edges]
        else:
            candidates = ([(order[a], order[b]) for a, b in g.edges()] for g in labeled_connected_graphs(k))
        for edges in candidates:
            found = self._check(order, labels, edges)
            if found and views_of(*found, self.radius) == target:
                return True
        return False

    def find_superset(self, s, work_limit: int = 5_000_000) -> frozenset[str] | None:
        views = self._decode(s)
        if views is None:
            return None
        if not views:
            return self._smallest_set()
        labels = self._labels(views)
        if labels is None:
            return None
        present: set[tuple[int, int]] = set()
        absent: set[tuple[int, int]] = set()
        fixed: set[int] = set()
        for view in views:
            members = sorted(view.labels)
            present |= view.edges
            for a, b in itertools.combinations(members, 2):
                if (a, b) not in view.edges:
                    absent.add((a, b))
            # Nodes strictly inside the ball have all their neighbours in it.
            dist = _view_distances(view)
            fixed |= {i for i, d in dist.items() if d < self.radius}
        if present & absent:
            return None
        known = sorted(labels)
        if len(known) > self.psi:
            return None
        target = frozenset(s)
        spare_ids = [i for i in range(1, self.max_id + 1) if i not in labels]
        strings = all_bitstrings(self.psi)
        work = 0
        for extra in range(self.psi - len(known) + 1):
            if extra > len(spare_ids):
                break
            if extra and known and all(i in fixed for i in known):
                break  # new nodes could never be connected
            new_ids = spare_ids[:extra]
            order = known + new_ids
            free = [
                (a, b)
                for a, b in itertools.combinations(sorted(order), 2)
                if (a, b) not in present and (a, b) not in absent and a not in fixed and b not in fixed
            ]
            for mask in range(1 << len(free)):
                edges = present | {free[i] for i in range(len(free)) if mask >> i & 1}
                for extra_inputs in itertools.product(strings, repeat=extra):
                    work += 1
                    if work > work_limit:
                        raise EnumerationTooLarge("superset search exceeded its work limit")
                    full = dict(labels)
                    full.update(zip(new_ids, extra_inputs))
                    found = self._check(order, full, edges)
                    if found:
                        image = views_of(*found, self.radius)
                        if target <= image:
                            return image
        return None

    def _smallest_set(self) -> frozenset[str] | None:
        for s in self.iter_sets():
            return s
        return None

    # -- enumeration --

    def estimate_size(self) -> int:
        total = 0
        strings = len(all_bitstrings(self.psi))
        for k in range(1, self.psi + 1):
            perms = 1
            for j in range(k):
                perms *= max(self.max_id - j, 0)
            total += len(connected_graphs(k)) * strings**k * perms
        return total

    def iter_sets(self) -> Iterator[frozenset[str]]:
        lang = self._lang()
        strings = all_bitstrings(self.psi)
        for k in range(1, self.psi + 1):
            for g in connected_graphs(k):
                for inputs in itertools.product(strings, repeat=k):
                    config = Configuration(g, inputs)
                    try:
                        if not lang.member(config):
                            continue
                    except MalformedInput:
                        continue
                    for perm in itertools.permutations(range(1, self.max_id + 1), k):
                        yield views_of(config, IdAssignment(perm), self.radius)

    def materialize(self, limit: int = DEFAULT_MATERIALIZE_LIMIT) -> ExplicitFamily:
        estimate = self.estimate_size()
        if estimate > limit:
            raise EnumerationTooLarge(f"family would enumerate ~{estimate} configurations (limit {limit})")
        return ExplicitFamily(frozenset(self.iter_sets()))


def _view_distances(view: DecodedView) -> dict[int, int]:
    adj: dict[int, list[int]] = {i: [] for i in view.labels}
    for a, b in view.edges:
        adj[a].append(b)
        adj[b].append(a)
    dist = {view.center_id: 0}
    frontier = [view.center_id]
    while frontier:
        nxt = []
        for u in frontier:
            for w in adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    nxt.append(w)
        frontier = nxt
    return dist


def decode_family(s: str) -> Family:
    fields = decode_fields(s)
    if not fields:
        raise CodecError("empty family record")
    tag = bits_to_int(fields[0])
    if tag == TAG_FAMILY_EXPLICIT:
        return ExplicitFamily(frozenset(frozenset(decode_fields(chunk)) for chunk in fields[1:]))
    if tag == TAG_FAMILY_GENERATED:
        name, radius, psi = decode_record(s, TAG_FAMILY_GENERATED, 3)
        return GeneratedFamily(bits_to_text(name), bits_to_int(radius), bits_to_int(psi))
    raise CodecError(f"unknown family tag {tag}")


@dataclass(frozen=True)
class CoverInput:
    element: str
    family: Family

    def encode(self) -> str:
        return encode_record(TAG_COVER_INPUT, [self.element, self.family.encode()])

    @classmethod
    def decode(cls, s: str) -> CoverInput:
        try:
            element, family = decode_record(s, TAG_COVER_INPUT, 2)
            return cls(element, decode_family(family))
        except CodecError as exc:
            raise MalformedInput(f"not a cover input: {exc}") from None

    @classmethod
    def explicit(cls, element: str, sets: Iterable[Iterable[str]]) -> CoverInput:
        return cls(element, ExplicitFamily.of(sets))


def parse_cover_inputs(config: Configuration) -> list[CoverInput]:
    return [CoverInput.decode(x) for x in config.inputs]


def member_cover(config: Configuration) -> bool:
    """Some node holds a set equal to the set of all elements."""
    parsed = parse_cover_inputs(config)
    elements = frozenset(c.element for c in parsed)
    return any(f.contains(elements) for f in {c.family for c in parsed})


def member_containment(config: Configuration) -> bool:
    """Some node holds a set containing every element."""
    parsed = parse_cover_inputs(config)
    elements = frozenset(c.element for c in parsed)
    return any(f.contains_superset_of(elements) for f in {c.family for c in parsed})
