"""Undirected graphs whose edge ids form the ground set for edge-based problems."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

from .errors import GraphParseError


@dataclass(frozen=True)
class Graph:
    """Undirected multigraph; edges are (u, v) pairs indexed 0..m-1."""

    node_count: int
    edges: Tuple[Tuple[int, int], ...]
    s: Optional[int] = None
    t: Optional[int] = None

    def __post_init__(self):
        if self.node_count < 1:
            raise ValueError("graph needs at least one node")
        for eid, (u, v) in enumerate(self.edges):
            if not (0 <= u < self.node_count and 0 <= v < self.node_count):
                raise ValueError(f"edge {eid} endpoint outside node range")
            if u == v:
                raise ValueError(f"edge {eid} is a self-loop")

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def source(self) -> int:
        return 0 if self.s is None else self.s

    @property
    def sink(self) -> int:
        return self.node_count - 1 if self.t is None else self.t

    def incident(self) -> List[List[Tuple[int, int]]]:
        """Per-node list of (edge id, other endpoint)."""
        adj: List[List[Tuple[int, int]]] = [[] for _ in range(self.node_count)]
        for eid, (u, v) in enumerate(self.edges):
            adj[u].append((eid, v))
            adj[v].append((eid, u))
        return adj


def parse_graph(text: str, s: Optional[int] = None, t: Optional[int] = None) -> Graph:
    """Parse the edge-list format: first line "n m", then m lines "u v".

    Node ids are 0-based; for s-t problems the defaults are s=0 and
    t=n-1 unless overridden.
    """
    lines = [ln for ln in text.splitlines()]
    rows = [(i + 1, ln.strip()) for i, ln in enumerate(lines) if ln.strip()]
    if not rows:
        raise GraphParseError(1, "empty graph description")
    line_no, header = rows[0]
    parts = header.split()
    if len(parts) != 2:
        raise GraphParseError(line_no, f"expected 'n m' header, got {header!r}")
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise GraphParseError(line_no, f"non-integer header {header!r}") from None
    if n < 1 or m < 0:
        raise GraphParseError(line_no, f"invalid sizes n={n} m={m}")
    if len(rows) - 1 != m:
        raise GraphParseError(line_no, f"declared {m} edges but found {len(rows) - 1}")
    edges = []
    for line_no, ln in rows[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise GraphParseError(line_no, f"expected 'u v', got {ln!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphParseError(line_no, f"non-integer endpoints {ln!r}") from None
        if not (0 <= u < n and 0 <= v < n):
            raise GraphParseError(line_no, f"endpoint outside 0..{n - 1}: {ln!r}")
        if u == v:
            raise GraphParseError(line_no, f"self-loop at node {u}")
        edges.append((u, v))
    if s is not None and not 0 <= s < n:
        raise GraphParseError(1, f"source {s} outside node range")
    if t is not None and not 0 <= t < n:
        raise GraphParseError(1, f"sink {t} outside node range")
    return Graph(n, tuple(edges), s=s, t=t)
