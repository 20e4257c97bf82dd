"""Triangulation and clique decomposition of a neighborhood graph.

The search space for both optimizers is the set of elimination orders.  An
order determines the fill edges and the maximal cliques of the filled graph;
its cost is either the total number of clique states (``objective="states"``)
or the number of fill edges (``objective="fill"``).
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence

from .exceptions import ConfigurationError, DecompositionError, SchemaError
from .network import NeighborhoodGraph

__all__ = [
    "Triangulation",
    "AnnealSchedule",
    "JunctionTree",
    "graham_is_acyclic",
    "triangulate",
    "is_chordal",
    "total_states",
    "greedy_decompose",
    "anneal_decompose",
    "build_junction_tree",
    "running_intersection_holds",
]

OBJECTIVES = ("states", "fill")


def graham_is_acyclic(hyperedges) -> bool:
    """GYO reduction: acyclic iff repeatedly deleting vertices that occur in a
    single hyperedge and hyperedges contained in another empties the hypergraph."""
    edges = [set(e) for e in hyperedges]
    while True:
        changed = False
        occurrences: dict = {}
        for e in edges:
            for v in e:
                occurrences[v] = occurrences.get(v, 0) + 1
        for e in edges:
            lonely = {v for v in e if occurrences[v] == 1}
            if lonely:
                e -= lonely
                changed = True
        kept = []
        for i, e in enumerate(edges):
            if not e:
                changed = True
                continue
            # contained in another edge (for equal edges drop all but the last)
            if any(j != i and (e < f or (e == f and j > i)) for j, f in enumerate(edges)):
                changed = True
                continue
            kept.append(e)
        edges = kept
        if not edges:
            return True
        if not changed:
            return False


@dataclass(frozen=True)
class Triangulation:
    order: tuple[str, ...]
    fill: frozenset
    cliques: tuple[tuple[str, ...], ...]
    cost: int | None = None
    objective: str | None = None

    def sorted_fill(self, nodes=None) -> list[tuple[str, str]]:
        nodes = nodes or self.order
        pos = {n: i for i, n in enumerate(nodes)}
        pairs = [tuple(sorted(e, key=pos.__getitem__)) for e in self.fill]
        return sorted(pairs, key=lambda p: (pos[p[0]], pos[p[1]]))


class _Eliminator:
    """Bitmask elimination over a fixed graph; vertices are indexed by node order."""

    def __init__(self, graph: NeighborhoodGraph, sizes: Mapping[str, int] | None):
        self.nodes = graph.nodes
        self.index = {n: i for i, n in enumerate(self.nodes)}
        self.adj = [0] * len(self.nodes)
        for e in graph.edges:
            a, b = (self.index[v] for v in e)
            self.adj[a] |= 1 << b
            self.adj[b] |= 1 << a
        if sizes is not None:
            missing = [n for n in self.nodes if n not in sizes]
            if missing:
                raise SchemaError(f"no domain size declared for {missing}")
            self.sizes = [int(sizes[n]) for n in self.nodes]
        else:
            self.sizes = None
        self._cache: dict[tuple, tuple] = {}

    def eliminate(self, order: Sequence[int]):
        adj = list(self.adj)
        remaining = (1 << len(adj)) - 1
        fill = []
        cands = []
        for v in order:
            nb = adj[v] & remaining & ~(1 << v)
            cands.append(nb | (1 << v))
            members = _bits(nb)
            for i, a in enumerate(members):
                missing = nb & ~adj[a] & ~(1 << a)
                for b in _bits(missing):
                    if b > a:
                        fill.append((a, b))
                adj[a] |= nb & ~(1 << a)
            remaining &= ~(1 << v)
        cliques = []
        for i, c in enumerate(cands):
            if any((c & d) == c and (c != d or j < i) for j, d in enumerate(cands) if j != i):
                continue
            cliques.append(c)
        return fill, cliques

    def states(self, mask: int) -> int:
        out = 1
        for i in _bits(mask):
            out *= self.sizes[i]
        return out

    def cost(self, order: tuple, objective: str) -> int:
        hit = self._cache.get(order)
        if hit is None:
            fill, cliques = self.eliminate(order)
            hit = (len(fill), sum(self.states(c) for c in cliques) if self.sizes else None)
            if len(self._cache) > 500_000:
                self._cache.clear()
            self._cache[order] = hit
        return hit[0] if objective == "fill" else hit[1]

    def clique_names(self, mask: int) -> tuple[str, ...]:
        return tuple(self.nodes[i] for i in _bits(mask))

    def result(self, order: Sequence[int], objective=None) -> Triangulation:
        fill, cliques = self.eliminate(order)
        names = sorted((self.clique_names(c) for c in cliques),
                       key=lambda c: [self.index[v] for v in c])
        cost = None
        if objective == "fill":
            cost = len(fill)
        elif objective == "states" and self.sizes is not None:
            cost = sum(self.states(c) for c in cliques)
        return Triangulation(
            tuple(self.nodes[i] for i in order),
            frozenset(frozenset((self.nodes[a], self.nodes[b])) for a, b in fill),
            tuple(names),
            cost,
            objective,
        )


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _check_objective(objective):
    if objective not in OBJECTIVES:
        raise ConfigurationError(f"objective must be one of {OBJECTIVES}, got {objective!r}")


def triangulate(graph: NeighborhoodGraph, order: Sequence[str]) -> Triangulation:
    """Eliminate vertices along ``order``; return fill edges and maximal cliques."""
    order = tuple(order)
    if sorted(order) != sorted(graph.nodes) or len(set(order)) != len(order):
        raise SchemaError("elimination order must be a permutation of the graph's nodes")
    el = _Eliminator(graph, None)
    return el.result([el.index[v] for v in order])


def is_chordal(graph: NeighborhoodGraph) -> bool:
    """Zero-fill elimination test: repeatedly remove a simplicial vertex."""
    adj = graph.adjacency()
    left = set(graph.nodes)
    while left:
        for v in sorted(left, key=graph.nodes.index):
            nb = adj[v] & left
            if all(b in adj[a] for a, b in combinations(nb, 2)):
                left.remove(v)
                break
        else:
            return False
    return True


def total_states(cliques, domain_sizes: Mapping[str, int]) -> int:
    """Sum over cliques of the product of member domain sizes."""
    total = 0
    for c in cliques:
        n = 1
        for a in c:
            if a not in domain_sizes:
                raise SchemaError(f"no domain size declared for {a!r}")
            n *= int(domain_sizes[a])
        total += n
    return total


def greedy_decompose(graph: NeighborhoodGraph, domain_sizes: Mapping[str, int], objective="states") -> Triangulation:
    """Min-fill elimination; ties by fewer clique states, then node order."""
    _check_objective(objective)
    el = _Eliminator(graph, domain_sizes)
    adj = list(el.adj)
    remaining = (1 << len(adj)) - 1
    order = []
    while remaining:
        best = None
        for v in _bits(remaining):
            nb = adj[v] & remaining & ~(1 << v)
            members = _bits(nb)
            fill = sum(1 for a, b in combinations(members, 2) if not adj[a] >> b & 1)
            key = (fill, el.states(nb | (1 << v)), v)
            if best is None or key < best:
                best = key
        v = best[2]
        nb = adj[v] & remaining & ~(1 << v)
        for a in _bits(nb):
            adj[a] |= nb & ~(1 << a)
        remaining &= ~(1 << v)
        order.append(v)
    return el.result(order, objective)


@dataclass(frozen=True)
class AnnealSchedule:
    """Geometric cooling schedule; ``None`` fields are derived from the problem.

    ``t0`` defaults to a tenth of the initial cost, ``steps_per_temp`` to
    ``100 * |V|``.  The run stops once the temperature falls below
    ``min_temp_ratio * t0`` or after ``patience`` temperatures without a new best.
    """

    t0: float | None = None
    alpha: float = 0.95
    steps_per_temp: int | None = None
    min_temp_ratio: float = 1e-3
    patience: int = 20

    def validate(self):
        if self.t0 is not None and not self.t0 >= 0:
            raise ConfigurationError(f"t0 must be nonnegative, got {self.t0}")
        if not 0 < self.alpha < 1:
            raise ConfigurationError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.steps_per_temp is not None and self.steps_per_temp < 1:
            raise ConfigurationError("steps_per_temp must be positive")
        if not 0 < self.min_temp_ratio < 1:
            raise ConfigurationError("min_temp_ratio must lie in (0, 1)")
        if self.patience < 1:
            raise ConfigurationError("patience must be positive")
        return self


def anneal_decompose(
    graph: NeighborhoodGraph,
    domain_sizes: Mapping[str, int],
    seed: int = 0,
    schedule: AnnealSchedule | None = None,
    objective: str = "states",
    initial: Sequence[str] | None = None,
) -> Triangulation:
    """Simulated annealing over elimination orders with pairwise-swap moves.

    Starts from the greedy order (or ``initial``) and returns the best order
    seen, so the result never costs more than the starting point.
    """
    _check_objective(objective)
    schedule = (schedule or AnnealSchedule()).validate()
    el = _Eliminator(graph, domain_sizes)
    n = len(el.nodes)
    if initial is None:
        start = greedy_decompose(graph, domain_sizes, objective).order
    else:
        start = tuple(initial)
        if sorted(start) != sorted(el.nodes):
            raise SchemaError("initial order must be a permutation of the graph's nodes")
    current = tuple(el.index[v] for v in start)
    cur_cost = el.cost(current, objective)
    best, best_cost = current, cur_cost
    t0 = cur_cost / 10 if schedule.t0 is None else schedule.t0
    steps = schedule.steps_per_temp or 100 * n
    rng = random.Random(seed)
    temp = t0
    stale = 0
    if n >= 2 and t0 > 0:
        while temp >= schedule.min_temp_ratio * t0 and stale < schedule.patience:
            improved = False
            for _ in range(steps):
                i, j = rng.sample(range(n), 2)
                cand = list(current)
                cand[i], cand[j] = cand[j], cand[i]
                cand = tuple(cand)
                c = el.cost(cand, objective)
                delta = c - cur_cost
                if delta <= 0 or rng.random() < math.exp(-delta / temp):
                    current, cur_cost = cand, c
                    if c < best_cost:
                        best, best_cost = cand, c
                        improved = True
            stale = 0 if improved else stale + 1
            temp *= schedule.alpha
    return el.result(best, objective)


@dataclass(frozen=True)
class JunctionTree:
    """Cliques joined by tree edges; each edge's separator is the clique intersection."""

    cliques: tuple[tuple[str, ...], ...]
    edges: tuple[tuple[int, int], ...]

    def separator(self, i: int, j: int) -> tuple[str, ...]:
        other = set(self.cliques[j])
        return tuple(a for a in self.cliques[i] if a in other)

    def neighbors(self, i: int) -> list[int]:
        return sorted({b for a, b in self.edges if a == i} | {a for a, b in self.edges if b == i})

    def separators(self) -> dict[tuple[int, int], tuple[str, ...]]:
        return {(i, j): self.separator(i, j) for i, j in self.edges}


def running_intersection_holds(tree: JunctionTree) -> bool:
    n = len(tree.cliques)
    if n and len(tree.edges) != n - 1:
        return False
    attrs = {a for c in tree.cliques for a in c}
    for a in attrs:
        holders = {i for i, c in enumerate(tree.cliques) if a in c}
        start = min(holders)
        seen = {start}
        stack = [start]
        while stack:
            i = stack.pop()
            for j in tree.neighbors(i):
                if j in holders and j not in seen:
                    seen.add(j)
                    stack.append(j)
        if seen != holders:
            return False
    # connectedness of the whole tree
    if n:
        seen = {0}
        stack = [0]
        while stack:
            for j in tree.neighbors(stack.pop()):
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        if len(seen) != n:
            return False
    return True


def build_junction_tree(cliques, order: Sequence[str] | None = None) -> JunctionTree:
    """Maximum-weight spanning tree on intersection sizes (Kruskal).

    Ties go to the smallest clique pair, comparing cliques by the position of
    their members in ``order`` (defaults to natural name order).
    """
    from ._order import natural_key

    cliques = [tuple(c) for c in cliques]
    if not cliques:
        return JunctionTree((), ())
    if not graham_is_acyclic(cliques):
        raise DecompositionError("cliques do not form an acyclic hypergraph")
    if order is None:
        rank = natural_key
    else:
        pos = {a: i for i, a in enumerate(order)}
        rank = lambda a: pos[a]  # noqa: E731
    cliques = [tuple(sorted(c, key=rank)) for c in cliques]
    ckey = [tuple(rank(a) for a in c) for c in cliques]
    pairs = []
    for i, j in combinations(range(len(cliques)), 2):
        w = len(set(cliques[i]) & set(cliques[j]))
        lo, hi = sorted((ckey[i], ckey[j]))
        pairs.append((-w, lo, hi, i, j))
    pairs.sort()
    parent = list(range(len(cliques)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edges = []
    for _, _, _, i, j in pairs:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            edges.append((i, j))
    tree = JunctionTree(tuple(cliques), tuple(edges))
    if not running_intersection_holds(tree):
        raise DecompositionError("spanning tree violates the running intersection property")
    return tree
