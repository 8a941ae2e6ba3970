"""Graphs sharing a degree sequence: swaps, the swap meta-graph, sampling.

A swap takes present edges ``{a, c}, {b, d}`` and absent pairs
``{a, d}, {b, c}`` and exchanges them, keeping every degree. Graphs with a
common degree sequence, joined when one swap apart, form the meta-graph;
:func:`meta_degree` is a graph's degree in it.
"""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

import numpy as np

from . import _chain
from .errors import FrozenChainWarning, NotGraphicalError, ValidationError
from .graph import Graph

__all__ = [
    "Swap",
    "enumerate_swaps",
    "apply_swap",
    "meta_degree",
    "SwapChain",
    "swap_chain_sample",
    "fixed_degree_null",
    "enumerate_fixed_degree",
    "is_graphical",
    "graph_code",
    "graph_from_code",
    "DEFAULT_BURN_IN_FACTOR",
    "DEFAULT_THIN_FACTOR",
]

DEFAULT_BURN_IN_FACTOR = 10
DEFAULT_THIN_FACTOR = 1
ENUMERATION_LIMIT = 10
_BUFFER = 1 << 16


@dataclass(frozen=True)
class Swap:
    """Remove ``{a, c}`` and ``{b, d}``, add ``{a, d}`` and ``{b, c}``."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if len({self.a, self.b, self.c, self.d}) != 4:
            raise ValidationError("swap needs four distinct vertices")

    @property
    def removed(self):
        return tuple(sorted((tuple(sorted((self.a, self.c))), tuple(sorted((self.b, self.d))))))

    @property
    def added(self):
        return tuple(sorted((tuple(sorted((self.a, self.d))), tuple(sorted((self.b, self.c))))))

    def canonical(self):
        # the four vertices form the cycle a-c-b-d-a; any vertex may lead
        a, b, c, d = self.a, self.b, self.c, self.d
        reps = [(a, b, c, d), (c, d, a, b), (b, a, d, c), (d, c, b, a)]
        return Swap(*min(reps))

    def inverse(self):
        """The swap undoing this one."""
        return Swap(self.a, self.b, self.d, self.c).canonical()

    def is_admissible(self, g: Graph):
        A = g.adjacency
        return bool(
            A[self.a, self.c] and A[self.b, self.d]
            and not A[self.a, self.d] and not A[self.b, self.c]
        )


def enumerate_swaps(g: Graph) -> list[Swap]:
    """All admissible swaps of ``g`` in canonical form, one per neighbor graph.

    Brute force over pairs of disjoint edges; meant for small graphs and as
    the reference for :func:`meta_degree`.
    """
    A = g.adjacency
    edges = [tuple(e) for e in g.edges().tolist()]
    out = set()
    for (x1, y1), (x2, y2) in itertools.combinations(edges, 2):
        if len({x1, y1, x2, y2}) != 4:
            continue
        # rewiring 1: {x1, y2}, {x2, y1}
        if not A[x1, y2] and not A[x2, y1]:
            out.add(Swap(x1, x2, y1, y2).canonical())
        # rewiring 2: {x1, x2}, {y1, y2}
        if not A[x1, x2] and not A[y1, y2]:
            out.add(Swap(x1, y2, y1, x2).canonical())
    return sorted(out, key=lambda s: (s.a, s.b, s.c, s.d))


def apply_swap(g: Graph, s: Swap) -> Graph:
    if not s.is_admissible(g):
        raise ValidationError(f"swap {s} is not admissible in this graph")
    adj = g.adjacency.copy()
    for u, v in s.removed:
        adj[u, v] = adj[v, u] = False
    for u, v in s.added:
        adj[u, v] = adj[v, u] = True
    return Graph(adj)


def _meta_degree_dense(adj):
    A = adj.astype(float)
    B = 1.0 - A
    np.fill_diagonal(B, 0.0)
    AB = A @ B
    return int(round(float(np.sum(AB * AB.T)) / 4.0))


def meta_degree(g: Graph) -> int:
    """Number of neighbors of ``g`` in the swap meta-graph.

    Counted as alternating edge / non-edge 4-cycles, ``tr((A B)^2) / 4``;
    agrees with ``len(enumerate_swaps(g))``.
    """
    return _meta_degree_dense(g.adjacency)


def graph_code(g: Graph) -> int:
    """Integer whose bits are the upper-triangle pairs in row-major order."""
    iu = np.triu_indices(g.n, 1)
    bits = g.adjacency[iu]
    return int(sum(1 << int(k) for k in np.flatnonzero(bits)))


def graph_from_code(n: int, code: int) -> Graph:
    iu = np.triu_indices(n, 1)
    bits = np.array([(code >> k) & 1 for k in range(iu[0].size)], dtype=bool)
    adj = np.zeros((n, n), dtype=bool)
    adj[iu[0][bits], iu[1][bits]] = True
    return Graph(adj | adj.T)


class SwapChain:
    """Degree-preserving swap chain targeting the uniform distribution.

    ``method="metropolis"`` proposes a uniformly chosen admissible swap and
    accepts it with probability ``min(1, M(g) / M(g'))``, ``M`` the
    meta-degree (tracked incrementally). ``method="lazy"`` draws one
    candidate (edge pair, rewiring) per step and holds when it is not
    admissible; it is symmetric, needs no meta-degree and is far cheaper per
    step, but moves only on a fraction of steps.
    """

    METHODS = ("metropolis", "lazy")

    def __init__(self, g0: Graph, seed=None, method="metropolis"):
        if method not in self.METHODS:
            raise ValidationError(f"unknown chain method {method!r}")
        self.method = method
        self.n = g0.n
        self._rng = np.random.default_rng(seed)
        self._adj = np.ascontiguousarray(g0.adjacency, dtype=np.uint8)
        self._edges = np.ascontiguousarray(g0.edges(), dtype=np.int64)
        self._deg = g0.degrees().astype(np.int64)
        self._bits = _chain.pack_bits(g0.adjacency)
        M = _meta_degree_dense(g0.adjacency)
        self._state = np.array([M, self._edges.shape[0], 0], dtype=np.int64)
        self._code = graph_code(g0) if self.n <= 11 else 0
        self.steps_taken = 0

    @property
    def frozen(self):
        return self._state[0] == 0

    @property
    def meta_degree(self):
        """Meta-degree of the current state (maintained by the metropolis kernel)."""
        if self.method == "metropolis":
            return int(self._state[0])
        return _meta_degree_dense(self._adj.astype(bool))

    @property
    def accepted(self):
        return int(self._state[2])

    def adjacency(self):
        return self._adj.astype(bool)

    def graph(self) -> Graph:
        return Graph(self._adj.astype(bool))

    def run(self, steps, trace=False):
        """Advance ``steps`` steps. With ``trace=True`` (``n <= 11`` only)
        return the :func:`graph_code` of the state after each step."""
        steps = int(steps)
        if steps < 0:
            raise ValidationError("steps must be non-negative")
        if trace and self.n > 11:
            raise ValidationError("state tracing supports n <= 11 only")
        out = np.empty(steps if trace else 0, dtype=np.int64)
        if steps == 0:
            return out if trace else None
        if self.frozen:
            if trace:
                out[:] = self._code
            self.steps_taken += steps
            return out if trace else None
        remaining = steps
        while remaining:
            rnd = self._rng.random(_BUFFER)
            view = out[steps - remaining:] if trace else out
            if self.method == "metropolis":
                done, self._code = _chain.metropolis_steps(
                    self._adj, self._bits, self._deg, self._edges, self._state,
                    remaining, rnd, view, self._code,
                )
            else:
                done, self._code = _chain.lazy_steps(
                    self._adj, self._edges, self._state, remaining, rnd, view, self._code,
                )
            remaining -= done
        self.steps_taken += steps
        if self.method == "lazy":
            self._bits = None
        return out if trace else None


def swap_chain_sample(g0: Graph, steps: int, seed=None, method="metropolis") -> Graph:
    """Run the swap chain from ``g0`` for ``steps`` steps and return the state.

    A graph with no admissible swap is returned unchanged with a
    :class:`FrozenChainWarning`.
    """
    chain = SwapChain(g0, seed, method)
    if steps > 0 and chain.frozen:
        warnings.warn("meta-degree is 0: chain frozen, returning input", FrozenChainWarning)
        return g0
    chain.run(steps)
    return chain.graph()


def fixed_degree_null(g0: Graph, replicates: int, seed=None, burn_in=None, thin=None,
                      method="metropolis"):
    """Yield ``replicates`` adjacency matrices from one chain started at ``g0``.

    Burn-in defaults to ``10 n^2`` steps and thinning to ``n^2`` steps
    between retained states.
    """
    n = g0.n
    burn_in = DEFAULT_BURN_IN_FACTOR * n * n if burn_in is None else int(burn_in)
    thin = DEFAULT_THIN_FACTOR * n * n if thin is None else int(thin)
    if thin < 1:
        raise ValidationError("thin must be positive")
    chain = SwapChain(g0, seed, method)
    chain.run(burn_in)
    for _ in range(int(replicates)):
        chain.run(thin)
        yield chain.adjacency()


# -- exhaustive enumeration ---------------------------------------------------

def is_graphical(d) -> bool:
    """Erdos-Gallai test."""
    d = sorted((int(x) for x in d), reverse=True)
    n = len(d)
    if any(x < 0 or x > n - 1 for x in d) or sum(d) % 2:
        return False
    for k in range(1, n + 1):
        lhs = sum(d[:k])
        rhs = k * (k - 1) + sum(min(x, k) for x in d[k:])
        if lhs > rhs:
            return False
    return True


def enumerate_fixed_degree(d) -> list[Graph]:
    """Every labeled simple graph with degree sequence ``d`` (``n <= 10``)."""
    d = [int(x) for x in d]
    n = len(d)
    if n < 1:
        raise ValidationError("empty degree sequence")
    if n > ENUMERATION_LIMIT:
        raise ValidationError(f"enumeration limited to n <= {ENUMERATION_LIMIT}, got {n}")
    if not is_graphical(d):
        raise NotGraphicalError(f"degree sequence {tuple(d)} is not graphical")

    found = []
    rem = list(d)
    adj = np.zeros((n, n), dtype=bool)

    def fill(i):
        if i == n:
            found.append(Graph(adj))
            return
        need = rem[i]
        if need == 0:
            fill(i + 1)
            return
        cands = [j for j in range(i + 1, n) if rem[j] > 0]
        if len(cands) < need:
            return
        for chosen in itertools.combinations(cands, need):
            for j in chosen:
                rem[j] -= 1
                adj[i, j] = adj[j, i] = True
            rem[i] = 0
            # a pending vertex can still reach the other n - i - 2 pending vertices
            if all(rem[j] <= n - i - 2 for j in range(i + 1, n)):
                fill(i + 1)
            rem[i] = need
            for j in chosen:
                rem[j] += 1
                adj[i, j] = adj[j, i] = False

    fill(0)
    return found
