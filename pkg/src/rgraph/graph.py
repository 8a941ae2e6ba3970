"""Simple undirected graphs on vertices ``0..n-1`` and the edge-list file format.

File format (ASCII)::

    n m
    i j        # m lines, 0 <= i < j < n, sorted, no duplicates

"""
from __future__ import annotations

import numpy as np

from .errors import GraphFormatError, ValidationError

__all__ = ["Graph", "degrees", "read_graph", "write_graph", "load_graph", "save_graph"]


class Graph:
    """Immutable simple graph backed by a dense boolean adjacency matrix."""

    __slots__ = ("_adj", "_n")

    def __init__(self, adjacency):
        adj = np.array(adjacency, dtype=bool, copy=True)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValidationError("adjacency must be a square matrix")
        if adj.shape[0] < 1:
            raise ValidationError("graph needs at least one vertex")
        if not np.array_equal(adj, adj.T):
            raise ValidationError("adjacency must be symmetric")
        if adj.diagonal().any():
            raise ValidationError("self-loops are not allowed")
        adj.setflags(write=False)
        self._adj = adj
        self._n = adj.shape[0]

    @classmethod
    def from_edges(cls, n, edges):
        n = int(n)
        if n < 1:
            raise ValidationError("graph needs at least one vertex")
        adj = np.zeros((n, n), dtype=bool)
        for i, j in edges:
            i, j = int(i), int(j)
            if i == j:
                raise ValidationError(f"self-loop at vertex {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise ValidationError(f"edge ({i}, {j}) out of range for n={n}")
            adj[i, j] = adj[j, i] = True
        return cls(adj)

    @classmethod
    def empty(cls, n):
        return cls(np.zeros((n, n), dtype=bool))

    @classmethod
    def complete(cls, n):
        adj = np.ones((n, n), dtype=bool)
        np.fill_diagonal(adj, False)
        return cls(adj)

    @property
    def n(self):
        return self._n

    @property
    def adjacency(self):
        """Read-only boolean ``n x n`` matrix."""
        return self._adj

    @property
    def m(self):
        return int(np.triu(self._adj, 1).sum())

    def edges(self):
        """Edges as an ``(m, 2)`` int array, rows ``i < j``, lexicographically sorted."""
        i, j = np.nonzero(np.triu(self._adj, 1))
        return np.column_stack([i, j]).astype(np.int64)

    def has_edge(self, i, j):
        return bool(self._adj[i, j])

    def degrees(self):
        return self._adj.sum(axis=1).astype(np.int64)

    def permute(self, perm):
        """Graph with vertex ``perm[i]`` of the result equal to vertex ``i`` here."""
        perm = np.asarray(perm)
        inv = np.argsort(perm)
        return Graph(self._adj[np.ix_(inv, inv)])

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self._n == other._n and np.array_equal(self._adj, other._adj)

    def __hash__(self):
        return hash((self._n, np.packbits(np.triu(self._adj, 1)).tobytes()))

    def __repr__(self):
        return f"Graph(n={self._n}, m={self.m})"


def degrees(g: Graph) -> np.ndarray:
    """Degree sequence of ``g``; sums to twice the edge count."""
    return g.degrees()


def write_graph(g: Graph) -> str:
    edges = g.edges()
    lines = [f"{g.n} {len(edges)}"]
    lines.extend(f"{i} {j}" for i, j in edges)
    return "\n".join(lines) + "\n"


def _parse_ints(line, lineno, count):
    parts = line.split()
    if len(parts) != count:
        raise GraphFormatError(f"expected {count} integers, got {line!r}", lineno)
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise GraphFormatError(f"non-integer token in {line!r}", lineno) from None


def read_graph(text: str) -> Graph:
    """Parse the edge-list format; errors name the offending line."""
    lines = text.splitlines()
    if not lines:
        raise GraphFormatError("empty input", 1)
    n, m = _parse_ints(lines[0], 1, 2)
    if n < 1:
        raise GraphFormatError(f"vertex count must be positive, got {n}", 1)
    if m < 0 or m > n * (n - 1) // 2:
        raise GraphFormatError(f"edge count {m} impossible for n={n}", 1)
    body = lines[1:]
    # tolerate trailing blank lines only
    while body and not body[-1].strip():
        body.pop()
    if len(body) != m:
        # point at the first surplus line, or just past the last edge
        line = m + 2 if len(body) > m else len(body) + 2
        raise GraphFormatError(f"header declares {m} edges, found {len(body)}", line)
    adj = np.zeros((n, n), dtype=bool)
    for offset, line in enumerate(body):
        lineno = offset + 2
        i, j = _parse_ints(line, lineno, 2)
        if i == j:
            raise GraphFormatError(f"self-loop at vertex {i}", lineno)
        if not (0 <= i < n and 0 <= j < n):
            raise GraphFormatError(f"vertex index out of range in ({i}, {j})", lineno)
        if i > j:
            raise GraphFormatError(f"edge ({i}, {j}) must be written with i < j", lineno)
        if adj[i, j]:
            raise GraphFormatError(f"duplicate edge ({i}, {j})", lineno)
        adj[i, j] = adj[j, i] = True
    return Graph(adj)


def load_graph(path) -> Graph:
    with open(path, "r", encoding="ascii") as fh:
        return read_graph(fh.read())


def save_graph(g: Graph, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(write_graph(g))
