"""Conditional constraint extraction, belief network and neighborhood graph."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from graphlib import CycleError, TopologicalSorter
from itertools import combinations, product
from typing import Iterable, Mapping, Sequence

from ._order import natural_key, ordered, sort_names
from .dependencies import Dependency, split_rhs
from .exceptions import CoverageError, CyclicDependencyError, SchemaError
from .relation import Relation

__all__ = [
    "ConditionalTable",
    "BeliefNetwork",
    "NeighborhoodGraph",
    "MarginalConstraint",
    "conditional_table",
    "extract_ccs",
    "build_bn",
    "neighborhood_graph",
    "moral_graph",
]


@dataclass
class ConditionalTable:
    """``P(child | parents)`` with one row per parent configuration.

    A row is a mapping ``child value -> probability`` or ``None`` when the
    configuration never occurs in the data (UNDEFINED).  ``counts`` keeps the
    raw co-occurrence counts so other estimators can run on identical input.
    """

    child: str
    parents: tuple[str, ...]
    child_domain: tuple
    parent_domains: tuple[tuple, ...]
    rows: dict[tuple, dict | None]
    counts: dict[tuple, dict] = field(default_factory=dict)

    def parent_configs(self):
        return list(product(*self.parent_domains))

    def undefined(self) -> list[tuple]:
        return [k for k in self.parent_configs() if self.rows.get(k) is None]

    def defined(self) -> dict[tuple, dict]:
        return {k: v for k, v in self.rows.items() if v is not None}

    def prob(self, parent_config, value):
        row = self.rows.get(tuple(parent_config))
        if row is None:
            return None
        return row.get(value, 0)

    @property
    def family(self) -> tuple[str, ...]:
        return self.parents + (self.child,)


def conditional_table(r: Relation, child: str, parents: Sequence[str]) -> ConditionalTable:
    """Conditional frequencies of ``child`` given ``parents`` read off ``r``."""
    parents = tuple(parents)
    for a in parents + (child,):
        r.attribute(a)
    pidx = [r.position(p) for p in parents]
    cidx = r.position(child)
    child_domain = r.domain(child)
    counts: dict[tuple, dict] = defaultdict(lambda: dict.fromkeys(child_domain, 0))
    for t, c in r.items():
        counts[tuple(t[i] for i in pidx)][t[cidx]] += c
    parent_domains = tuple(r.domain(p) for p in parents)
    rows: dict[tuple, dict | None] = {}
    full_counts = {}
    for cfg in product(*parent_domains):
        cc = dict(counts[cfg]) if cfg in counts else dict.fromkeys(child_domain, 0)
        full_counts[cfg] = cc
        n = sum(cc.values())
        rows[cfg] = {v: Fraction(k, n) for v, k in cc.items()} if n else None
    return ConditionalTable(child, parents, child_domain, parent_domains, rows, full_counts)


def extract_ccs(relations, deps: Iterable[Dependency]) -> list[ConditionalTable]:
    """One conditional table per single-consequent dependency.

    Each table is read from the first relation containing the dependency's
    attributes.  Parent configurations with zero count stay UNDEFINED.
    """
    if isinstance(relations, Relation):
        relations = [relations]
    relations = list(relations)
    tables = []
    for d in split_rhs(deps):
        need = d.attributes
        host = next((r for r in relations if need <= set(r.names)), None)
        if host is None:
            raise CoverageError(f"no relation contains the attributes of {d}")
        tables.append(conditional_table(host, d.rhs[0], host.resolve(d.lhs)))
    return tables


@dataclass(frozen=True)
class BeliefNetwork:
    """Directed graph with one parent -> child edge per dependency member."""

    nodes: tuple[str, ...]
    edges: frozenset
    families: tuple[tuple[str, tuple[str, ...]], ...] = ()

    def parents(self, node) -> tuple[str, ...]:
        return ordered((p for p, c in self.edges if c == node), self.nodes)

    def children(self, node) -> tuple[str, ...]:
        return ordered((c for p, c in self.edges if p == node), self.nodes)

    def roots(self) -> tuple[str, ...]:
        return tuple(n for n in self.nodes if not self.parents(n))

    def topological_order(self) -> tuple[str, ...]:
        ts = TopologicalSorter({n: self.parents(n) for n in self.nodes})
        return tuple(ts.static_order())

    def moral_families(self) -> list[tuple[str, ...]]:
        """Each dependency's family (consequent plus determinants)."""
        return [ps + (c,) for c, ps in self.families]


def build_bn(deps: Iterable[Dependency], nodes: Sequence[str] | None = None) -> BeliefNetwork:
    deps = split_rhs(deps)
    mentioned = set().union(*(d.attributes for d in deps)) if deps else set()
    if nodes is None:
        nodes = tuple(sort_names(mentioned))
    else:
        nodes = tuple(nodes)
        missing = mentioned - set(nodes)
        if missing:
            raise SchemaError(f"dependencies mention undeclared attributes {sort_names(missing)}")
    edges = set()
    families = []
    for d in deps:
        child = d.rhs[0]
        parents = ordered(d.lhs, nodes)
        families.append((child, parents))
        edges.update((p, child) for p in parents)
    graph = {n: set() for n in nodes}
    for p, c in edges:
        graph[c].add(p)
    try:
        tuple(TopologicalSorter(graph).static_order())
    except CycleError as exc:
        raise CyclicDependencyError(exc.args[1]) from None
    return BeliefNetwork(nodes, frozenset(edges), tuple(families))


@dataclass(frozen=True)
class NeighborhoodGraph:
    nodes: tuple[str, ...]
    edges: frozenset

    def neighbors(self, node) -> frozenset:
        return frozenset(v for e in self.edges if node in e for v in e if v != node)

    def adjacency(self) -> dict[str, set]:
        adj = {n: set() for n in self.nodes}
        for e in self.edges:
            a, b = tuple(e)
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def has_edge(self, a, b) -> bool:
        return frozenset((a, b)) in self.edges

    def sorted_edges(self) -> list[tuple[str, str]]:
        pos = {n: i for i, n in enumerate(self.nodes)}
        pairs = [tuple(sorted(e, key=pos.__getitem__)) for e in self.edges]
        return sorted(pairs, key=lambda p: (pos[p[0]], pos[p[1]]))


def neighborhood_graph(families: Iterable[Iterable[str]], nodes: Sequence[str] | None = None) -> NeighborhoodGraph:
    """Union of complete graphs over each family (the moral graph of the network)."""
    families = [set(f) for f in families]
    every = set().union(*families) if families else set()
    if nodes is None:
        nodes = tuple(sort_names(every))
    else:
        nodes = tuple(nodes)
        if not every <= set(nodes):
            raise SchemaError(f"families mention unknown attributes {sort_names(every - set(nodes))}")
    edges = {frozenset(p) for f in families for p in combinations(sorted(f, key=natural_key), 2)}
    return NeighborhoodGraph(nodes, frozenset(edges))


def moral_graph(bn: BeliefNetwork) -> NeighborhoodGraph:
    return neighborhood_graph(bn.moral_families(), bn.nodes)


@dataclass(frozen=True)
class MarginalConstraint:
    """A target distribution over the configurations of ``attrs``."""

    attrs: tuple[str, ...]
    target: Mapping[tuple, float]

    def __post_init__(self):
        attrs = (self.attrs,) if isinstance(self.attrs, str) else tuple(self.attrs)
        object.__setattr__(self, "attrs", attrs)
        target = {}
        for k, v in dict(self.target).items():
            k = k if isinstance(k, tuple) else (k,)
            if len(k) != len(attrs):
                raise SchemaError(f"configuration {k} does not match attributes {attrs}")
            if v < 0:
                raise SchemaError(f"negative probability {v} for {k}")
            target[k] = target.get(k, 0) + v
        total = sum(target.values())
        if abs(total - 1) > 1e-9:
            raise SchemaError(f"constraint on {attrs} sums to {float(total)}, not 1")
        object.__setattr__(self, "target", target)

    @classmethod
    def point(cls, assignment: Mapping):
        """Hard evidence as a point mass."""
        attrs = tuple(assignment)
        return cls(attrs, {tuple(assignment[a] for a in attrs): 1})
