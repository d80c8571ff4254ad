"""DAG representation, reachability, adjustment-set criteria, and the two
structural baseline metrics (SHD and SID).

Nodes are integers 0..num_nodes-1 and double as column indices of the
observational dataset.  All graph values are immutable after construction and
every operation here is a pure function.
"""

from __future__ import annotations

from collections import deque
from itertools import combinations
from typing import Iterable

from .errors import CycleError, OverlapError, SizeMismatchError


class Dag:
    """Immutable directed acyclic graph over nodes 0..num_nodes-1.

    Construction validates everything: indices in range (IndexError),
    acyclicity including self-loops (CycleError).  Duplicate edges collapse.
    """

    __slots__ = ("num_nodes", "edges", "_parents", "_children", "_topo")

    def __init__(self, num_nodes: int, edges: Iterable[tuple[int, int]] = ()):
        n = int(num_nodes)
        if n < 1:
            raise ValueError(f"num_nodes must be positive, got {num_nodes!r}")
        edge_set = set()
        for i, j in edges:
            i, j = int(i), int(j)
            if not (0 <= i < n and 0 <= j < n):
                raise IndexError(f"edge ({i}, {j}) out of range for {n} nodes")
            if i == j:
                raise CycleError(f"self-loop at node {i}")
            edge_set.add((i, j))
        parents = [set() for _ in range(n)]
        children = [set() for _ in range(n)]
        for i, j in edge_set:
            children[i].add(j)
            parents[j].add(i)
        # Kahn's algorithm; leftovers mean a directed cycle.
        indeg = [len(parents[v]) for v in range(n)]
        queue = deque(v for v in range(n) if indeg[v] == 0)
        topo = []
        while queue:
            v = queue.popleft()
            topo.append(v)
            for c in children[v]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    queue.append(c)
        if len(topo) != n:
            raise CycleError("edge set contains a directed cycle")
        object.__setattr__(self, "num_nodes", n)
        object.__setattr__(self, "edges", frozenset(edge_set))
        object.__setattr__(self, "_parents", tuple(frozenset(p) for p in parents))
        object.__setattr__(self, "_children", tuple(frozenset(c) for c in children))
        object.__setattr__(self, "_topo", tuple(topo))

    def __setattr__(self, name, value):
        raise AttributeError("Dag is immutable")

    def parents(self, node: int) -> frozenset[int]:
        _check_node(self, node)
        return self._parents[node]

    def children(self, node: int) -> frozenset[int]:
        _check_node(self, node)
        return self._children[node]

    @property
    def topological_order(self) -> tuple[int, ...]:
        return self._topo

    def without_edges(self, drop: Iterable[tuple[int, int]]) -> "Dag":
        """Copy with the given edges removed (used for mutilated graphs)."""
        dropped = set(drop)
        return Dag(self.num_nodes, self.edges - dropped)

    def __eq__(self, other):
        if not isinstance(other, Dag):
            return NotImplemented
        return self.num_nodes == other.num_nodes and self.edges == other.edges

    def __hash__(self):
        return hash((self.num_nodes, self.edges))

    def __repr__(self):
        return f"Dag({self.num_nodes}, {sorted(self.edges)})"


def _check_node(g: Dag, node: int) -> None:
    if not (0 <= node < g.num_nodes):
        raise IndexError(f"node {node} out of range for {g.num_nodes} nodes")


def build_dag(num_nodes: int, edges: Iterable[tuple[int, int]]) -> Dag:
    """Validate and build a Dag; see the Dag constructor for error semantics."""
    return Dag(num_nodes, edges)


def descendants(g: Dag, node: int) -> frozenset[int]:
    """Nodes reachable from ``node`` along directed edges, including itself."""
    _check_node(g, node)
    seen = {node}
    stack = [node]
    while stack:
        for c in g.children(stack.pop()):
            if c not in seen:
                seen.add(c)
                stack.append(c)
    return frozenset(seen)


def ancestors(g: Dag, node: int) -> frozenset[int]:
    """Nodes that reach ``node`` along directed edges, including itself."""
    _check_node(g, node)
    seen = {node}
    stack = [node]
    while stack:
        for p in g.parents(stack.pop()):
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return frozenset(seen)


def has_directed_path(g: Dag, i: int, j: int) -> bool:
    """True iff a directed path i -> ... -> j exists."""
    _check_node(g, i)
    _check_node(g, j)
    if i == j:
        raise ValueError("i and j must differ")
    return j in descendants(g, i)


def causal_nodes(g: Dag, i: int, j: int) -> frozenset[int]:
    """Nodes lying on at least one directed i -> j path (i and j included).

    Empty when no such path exists.
    """
    _check_node(g, i)
    _check_node(g, j)
    if i == j:
        raise ValueError("i and j must differ")
    reach = descendants(g, i)
    if j not in reach:
        return frozenset()
    return reach & ancestors(g, j)


def d_separated(g: Dag, i: int, j: int, given: Iterable[int]) -> bool:
    """d-separation of single nodes i and j by the set ``given``.

    Uses the ancestral moral graph: restrict to ancestors of {i, j} + given,
    marry parents, drop directions, delete ``given``; i and j are d-separated
    iff they are then disconnected.
    """
    _check_node(g, i)
    _check_node(g, j)
    z = frozenset(int(v) for v in given)
    for v in z:
        _check_node(g, v)
    if i == j:
        raise ValueError("i and j must differ")
    if z & {i, j}:
        raise OverlapError(f"conditioning set {sorted(z)} intersects {{{i}, {j}}}")

    relevant = set()
    stack = [i, j, *z]
    while stack:
        v = stack.pop()
        if v in relevant:
            continue
        relevant.add(v)
        stack.extend(g.parents(v))

    neighbors = {v: set() for v in relevant}
    for v in relevant:
        ps = g.parents(v)
        for p in ps:
            neighbors[v].add(p)
            neighbors[p].add(v)
        for p, q in combinations(ps, 2):
            neighbors[p].add(q)
            neighbors[q].add(p)

    seen = {i}
    stack = [i]
    while stack:
        for u in neighbors[stack.pop()]:
            if u == j:
                return False
            if u not in seen and u not in z:
                seen.add(u)
                stack.append(u)
    return True


def _proper_backdoor_graph(g: Dag, i: int, j: int) -> Dag:
    """Remove the first edge of every directed i -> j path."""
    cn = causal_nodes(g, i, j)
    first = {(i, c) for c in g.children(i) if c in cn}
    return g.without_edges(first) if first else g


def is_valid_adjustment(g: Dag, i: int, j: int, adjustment: Iterable[int]) -> bool:
    """Whether ``adjustment`` is a valid adjustment set for the pair (i, j).

    Two graphical clauses must hold:

    * no member of the set descends from a node on a directed i -> j path
      other than i itself (descendants of i that sit off every causal route
      are fine);
    * the set d-separates i from j once the first edge of every directed
      i -> j path is removed (so all back-door paths are blocked).
    """
    _check_node(g, i)
    _check_node(g, j)
    if i == j:
        raise ValueError("i and j must differ")
    z = frozenset(int(v) for v in adjustment)
    for v in z:
        _check_node(g, v)
    if z & {i, j}:
        raise OverlapError(f"adjustment set {sorted(z)} intersects {{{i}, {j}}}")

    forbidden = set()
    for k in causal_nodes(g, i, j) - {i}:
        forbidden |= descendants(g, k)
    if z & forbidden:
        return False
    return d_separated(_proper_backdoor_graph(g, i, j), i, j, z)


def shd(g1: Dag, g2: Dag) -> int:
    """Structural Hamming distance: unordered node pairs whose edge status
    (absent / i->j / j->i) differs; a reversal counts as one edit."""
    if g1.num_nodes != g2.num_nodes:
        raise SizeMismatchError(
            f"graphs have {g1.num_nodes} and {g2.num_nodes} nodes")

    def status(g: Dag, i: int, j: int) -> int:
        if (i, j) in g.edges:
            return 1
        if (j, i) in g.edges:
            return 2
        return 0

    return sum(
        status(g1, i, j) != status(g2, i, j)
        for i, j in combinations(range(g1.num_nodes), 2)
    )


def sid(g_true: Dag, g_learnt: Dag) -> int:
    """Structural intervention distance: ordered pairs (i, j) whose
    interventional distribution the learnt graph gets wrong.

    When the learnt graph makes j a parent of i it claims interventions on i
    cannot move j; that claim is wrong iff the true graph has a directed
    i -> j path.  Otherwise the learnt parent set of i is used as the
    adjustment set and the pair counts as a mistake iff that set is invalid
    in the true graph.
    """
    if g_true.num_nodes != g_learnt.num_nodes:
        raise SizeMismatchError(
            f"graphs have {g_true.num_nodes} and {g_learnt.num_nodes} nodes")
    mistakes = 0
    for i in range(g_true.num_nodes):
        pa = g_learnt.parents(i)
        for j in range(g_true.num_nodes):
            if i == j:
                continue
            if j in pa:
                mistakes += has_directed_path(g_true, i, j)
            else:
                mistakes += not is_valid_adjustment(g_true, i, j, pa)
    return mistakes
