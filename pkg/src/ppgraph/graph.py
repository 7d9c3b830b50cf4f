"""Undirected dependence graphs over the component processes of a pattern."""
from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

SYMMETRY_TOL = 1e-12
BOUND_TOL = 1e-9


@dataclass(frozen=True)
class DependenceGraph:
    """Nodes are type labels; ``edges`` maps canonical index pairs ``i < j`` to weights."""

    nodes: tuple[str, ...]
    edges: Mapping[tuple[int, int], float]
    alpha: float
    _adj: tuple[frozenset[int], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        nodes = tuple(str(n) for n in self.nodes)
        if len(set(nodes)) != len(nodes):
            raise ValueError(f"node labels must be distinct: {nodes}")
        edges = {}
        for (i, j), w in self.edges.items():
            i, j = int(i), int(j)
            if i == j:
                raise ValueError(f"self-loop at node {nodes[i]!r}")
            if not (0 <= i < len(nodes) and 0 <= j < len(nodes)):
                raise ValueError(f"edge ({i}, {j}) references a missing node")
            key = (min(i, j), max(i, j))
            if key in edges:
                raise ValueError(f"duplicate edge {key}")
            if not float(w) > self.alpha:
                raise ValueError(f"edge {key} weight {w} does not exceed alpha {self.alpha}")
            edges[key] = float(w)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", dict(sorted(edges.items())))
        object.__setattr__(self, "alpha", float(self.alpha))
        adj = [set() for _ in nodes]
        for i, j in edges:
            adj[i].add(j)
            adj[j].add(i)
        object.__setattr__(self, "_adj", tuple(frozenset(a) for a in adj))

    def index(self, node: str | int) -> int:
        if isinstance(node, (int, np.integer)):
            if not 0 <= node < len(self.nodes):
                raise KeyError(f"node index {node} out of range")
            return int(node)
        try:
            return self.nodes.index(node)
        except ValueError:
            raise KeyError(f"unknown node {node!r}") from None

    def edge_labels(self) -> set[tuple[str, str]]:
        return {(self.nodes[i], self.nodes[j]) for i, j in self.edges}

    def has_edge(self, a, b) -> bool:
        i, j = sorted((self.index(a), self.index(b)))
        return (i, j) in self.edges

    def degree(self, node) -> int:
        return len(self._adj[self.index(node)])


def build_sdgm(sup_matrix, labels: Iterable[str], alpha: float) -> DependenceGraph:
    """Join i and j whenever ``sup_matrix[i, j] > alpha``."""
    s = np.asarray(sup_matrix, dtype=float)
    labels = tuple(labels)
    if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] != len(labels):
        raise ValueError(f"sup matrix of shape {s.shape} does not match {len(labels)} labels")
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if not np.allclose(s, s.T, rtol=0, atol=SYMMETRY_TOL):
        raise ValueError("sup matrix must be symmetric")
    off = s[~np.eye(len(labels), dtype=bool)]
    if np.any(off < 0) or np.any(off > 1 + BOUND_TOL):
        raise ValueError("sup matrix entries must lie in [0, 1]")
    iu, ju = np.triu_indices(len(labels), 1)
    edges = {(int(i), int(j)): float(s[i, j]) for i, j in zip(iu, ju) if s[i, j] > alpha}
    return DependenceGraph(labels, edges, alpha)


def _reach(adj, start: set[int], removed: set[int]) -> set[int]:
    seen = set(start) - removed
    queue = deque(seen)
    while queue:
        v = queue.popleft()
        for u in adj[v]:
            if u not in seen and u not in removed:
                seen.add(u)
                queue.append(u)
    return seen


def separation_query(graph: DependenceGraph, A, B, C=()) -> bool:
    """True when C separates A from B: no path avoiding C joins them."""
    A, B, C = ({graph.index(v) for v in s} for s in (A, B, C))
    if A & B or A & C or B & C:
        raise ValueError("A, B and C must be pairwise disjoint")
    return not (_reach(graph._adj, A, C) & B)


def components_and_neighbourhoods(graph: DependenceGraph):
    """Connected components (in order of first node) and neighbour sets, by label."""
    seen: set[int] = set()
    components = []
    for v in range(len(graph.nodes)):
        if v in seen:
            continue
        comp = _reach(graph._adj, {v}, set())
        seen |= comp
        components.append(frozenset(graph.nodes[u] for u in comp))
    neighbours = {graph.nodes[v]: frozenset(graph.nodes[u] for u in graph._adj[v])
                  for v in range(len(graph.nodes))}
    return components, neighbours


_DOT_ID = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _dot_id(label: str) -> str:
    if _DOT_ID.match(label):
        return label
    return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_graph(graph: DependenceGraph, format: str = "json") -> bytes:
    """Serialise to Graphviz DOT or JSON; output bytes depend only on the graph."""
    if format == "dot":
        lines = ["graph sdgm {", f'  graph [alpha="{graph.alpha:.6f}"];']
        lines += [f"  {_dot_id(n)};" for n in graph.nodes]
        for (i, j), w in graph.edges.items():
            lines.append(f'  {_dot_id(graph.nodes[i])} -- {_dot_id(graph.nodes[j])} '
                         f'[weight="{w:.6f}"];')
        lines.append("}")
        return ("\n".join(lines) + "\n").encode("utf-8")
    if format == "json":
        doc = {
            "nodes": list(graph.nodes),
            "alpha": graph.alpha,
            "edges": [{"i": graph.nodes[i], "j": graph.nodes[j], "weight": w}
                      for (i, j), w in graph.edges.items()],
        }
        return (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode("utf-8")
    raise ValueError(f"unknown export format {format!r}; use 'dot' or 'json'")


def import_graph(data: bytes | str) -> DependenceGraph:
    """Inverse of ``export_graph(..., "json")``."""
    doc = json.loads(data)
    nodes = tuple(doc["nodes"])
    pos = {n: k for k, n in enumerate(nodes)}
    edges = {(pos[e["i"]], pos[e["j"]]): e["weight"] for e in doc["edges"]}
    return DependenceGraph(nodes, edges, doc["alpha"])


def edge_fact_diff(graph: DependenceGraph, present=(), absent=()) -> list[tuple[str, str, str, str]]:
    """Check expected edges and non-edges against a graph.

    Returns rows ``(a, b, expected, observed)`` with values "edge" or
    "none", one per fact, in the order given.
    """
    rows = []
    for pairs, expected in ((present, "edge"), (absent, "none")):
        for a, b in pairs:
            observed = "edge" if graph.has_edge(a, b) else "none"
            rows.append((a, b, expected, observed))
    return rows
