"""JSON and text formats for structures, graphs and XOR systems."""
from __future__ import annotations

import json
from typing import Any

from .graphs import OrderedGraph, graph_from_structure, graph_structure
from .structures import Structure, Vocabulary


def dumps(obj: Any) -> str:
    """Canonical JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def structure_to_dict(S: Structure) -> dict:
    return {
        "vocab": [{"name": s.name, "arity": s.arity} for s in S.vocab],
        "n": S.n,
        "relations": {s: [list(t) for t in S.tuples(s)] for s in S.vocab.names},
    }


def structure_from_dict(d: dict) -> Structure:
    try:
        vocab = Vocabulary.of(*[(v["name"], int(v["arity"])) for v in d["vocab"]])
        rel = {name: [tuple(t) for t in ts] for name, ts in d.get("relations", {}).items()}
        return Structure(vocab, int(d["n"]), rel)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed structure JSON: {exc}") from exc


def dump_structure(S: Structure) -> str:
    return dumps(structure_to_dict(S))


def load_structure(text: str) -> Structure:
    return structure_from_dict(json.loads(text))


def graph_to_dict(G: OrderedGraph) -> dict:
    """Graphs use the structure format with one symmetric binary relation E."""
    return structure_to_dict(graph_structure(G))


def dump_graph(G: OrderedGraph) -> str:
    return dumps(graph_to_dict(G))


def dump_graph_edgelist(G: OrderedGraph) -> str:
    lines = [f"p {G.n} {len(G.edges)}"] + [f"e {u + 1} {v + 1}" for u, v in G.edges]
    return "\n".join(lines) + "\n"


def load_graph(text: str) -> OrderedGraph:
    """Accepts the structure-format JSON, ``{"n": .., "edges": [[u, v], ..]}``
    (0-based) or the ``p``/``e`` edge-list text (1-based)."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        d = json.loads(text)
        if "vocab" in d:
            return graph_from_structure(structure_from_dict(d))
        return OrderedGraph.from_edges(int(d["n"]), d["edges"])
    n = None
    edges = []
    for raw in text.splitlines():
        parts = raw.split()
        if not parts or parts[0] in ("c", "#"):
            continue
        if parts[0] == "p":
            n = int(parts[1])
        elif parts[0] == "e":
            edges.append((int(parts[1]) - 1, int(parts[2]) - 1))
        else:
            raise ValueError(f"unrecognised graph line {raw!r}")
    if n is None:
        raise ValueError("edge list lacks a 'p <vertices> <edges>' line")
    return OrderedGraph.from_edges(n, edges)
