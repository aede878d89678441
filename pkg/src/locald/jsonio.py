"""JSON documents for configurations, identities and certificates.

A graph document looks like::

    {"nodes": [{"name": "a", "input": "01", "id": 3, "certificate": "1"}, ...],
     "edges": [["a", "b"], ...]}

``id`` and ``certificate`` are optional; missing identities default to
``1..n`` in node order.
"""

from __future__ import annotations

import hashlib
import json
from collections.abc import Mapping, Sequence
from typing import Any

from .bits import check_bitstring
from .errors import CodecError, MalformedInput
from .graph import Configuration, IdAssignment, build_graph


def config_to_json(
    config: Configuration,
    ids: IdAssignment | None = None,
    certificate: Sequence[str] | None = None,
) -> dict[str, Any]:
    g = config.graph
    nodes = []
    for v in g.nodes:
        node: dict[str, Any] = {"name": g.names[v], "input": config.inputs[v]}
        if ids is not None:
            node["id"] = ids[v]
        if certificate is not None:
            node["certificate"] = certificate[v]
        nodes.append(node)
    edges = [[g.names[a], g.names[b]] for a, b in g.edges()]
    return {"nodes": nodes, "edges": edges}


def config_from_json(doc: Mapping[str, Any]) -> tuple[Configuration, IdAssignment, tuple[str, ...] | None]:
    """Parse a graph document into ``(config, ids, certificate or None)``."""
    try:
        raw_nodes = doc["nodes"]
        raw_edges = doc.get("edges", [])
    except (KeyError, TypeError, AttributeError):
        raise MalformedInput("graph document needs a 'nodes' list") from None
    if not raw_nodes:
        raise MalformedInput("graph document has no nodes")
    names = []
    for k, node in enumerate(raw_nodes):
        if not isinstance(node, Mapping):
            raise MalformedInput(f"node #{k} is not an object")
        names.append(str(node.get("name", k)))
    if len(set(names)) != len(names):
        raise MalformedInput("node names must be distinct")
    edges = []
    for e in raw_edges:
        if not isinstance(e, Sequence) or isinstance(e, str) or len(e) != 2:
            raise MalformedInput(f"edge {e!r} is not a pair")
        edges.append((str(e[0]), str(e[1])))
    unknown = {x for e in edges for x in e} - set(names)
    if unknown:
        raise MalformedInput(f"edges mention undeclared nodes {sorted(unknown)}")
    graph = build_graph(edges, names)
    by_name = {str(node.get("name", k)): node for k, node in enumerate(raw_nodes)}
    ordered = [by_name[name] for name in graph.names]
    try:
        inputs = tuple(check_bitstring(node.get("input", ""), "input") for node in ordered)
    except CodecError as exc:
        raise MalformedInput(str(exc)) from None
    config = Configuration(graph, inputs)
    if any("id" in node for node in ordered):
        if not all("id" in node for node in ordered):
            raise MalformedInput("either every node has an id or none does")
        ids = IdAssignment(tuple(int(node["id"]) for node in ordered))
    else:
        ids = IdAssignment.sequential(graph.n)
    certificate = None
    if any("certificate" in node for node in ordered):
        if not all("certificate" in node for node in ordered):
            raise MalformedInput("either every node has a certificate or none does")
        try:
            certificate = tuple(check_bitstring(node["certificate"], "certificate") for node in ordered)
        except CodecError as exc:
            raise MalformedInput(str(exc)) from None
    return config, ids, certificate


def canonical_dumps(doc: Any) -> str:
    """Byte-stable JSON: sorted keys, no incidental whitespace."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def content_hash(doc: Any) -> str:
    return hashlib.sha256(canonical_dumps(doc).encode()).hexdigest()
