"""Functional/multivalued dependencies, keys and 4NF decomposition."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .exceptions import SchemaError, UnsupportedDependencyError
from .relation import Relation, natural_join, project

__all__ = [
    "Dependency",
    "Decomposition",
    "attribute_closure",
    "is_key",
    "find_key",
    "split_rhs",
    "decompose_4nf",
    "verify_lossless_join",
    "preserves_fds",
]

ARROWS = {"FD": "->", "MD": "->>", "PD": "|->"}


@dataclass(frozen=True)
class Dependency:
    kind: str
    lhs: tuple[str, ...]
    rhs: tuple[str, ...]

    def __post_init__(self):
        if self.kind not in ARROWS:
            raise SchemaError(f"unknown dependency kind {self.kind!r}")
        object.__setattr__(self, "lhs", tuple(self.lhs))
        object.__setattr__(self, "rhs", tuple(self.rhs))

    @classmethod
    def fd(cls, lhs, rhs):
        return cls("FD", _as_tuple(lhs), _as_tuple(rhs))

    @classmethod
    def md(cls, lhs, rhs):
        return cls("MD", _as_tuple(lhs), _as_tuple(rhs))

    @classmethod
    def pd(cls, lhs, rhs):
        return cls("PD", _as_tuple(lhs), _as_tuple(rhs))

    @property
    def attributes(self) -> frozenset:
        return frozenset(self.lhs) | frozenset(self.rhs)

    def __str__(self):
        return f"{','.join(self.lhs)} {ARROWS[self.kind]} {','.join(self.rhs)}"


def _as_tuple(attrs):
    return (attrs,) if isinstance(attrs, str) else tuple(attrs)


@dataclass(frozen=True)
class Decomposition:
    schemes: tuple[tuple[str, ...], ...]
    key_scheme: tuple[str, ...] | None = None
    notes: tuple[str, ...] = field(default=(), compare=False)

    def __iter__(self):
        return iter(self.schemes)

    def __len__(self):
        return len(self.schemes)


def _fds(deps) -> list[Dependency]:
    out = []
    for d in deps:
        if d.kind != "FD":
            raise UnsupportedDependencyError(f"only functional dependencies are supported here, got {d}")
        out.append(d)
    return out


def attribute_closure(fds: Iterable[Dependency], attrs) -> frozenset:
    """Closure of ``attrs`` under the functional dependencies ``fds``."""
    fds = _fds(fds)
    closure = set(_as_tuple(attrs))
    changed = True
    while changed:
        changed = False
        for d in fds:
            if closure.issuperset(d.lhs) and not closure.issuperset(d.rhs):
                closure.update(d.rhs)
                changed = True
    return frozenset(closure)


def is_key(fds, scheme: Sequence[str], key) -> bool:
    """True iff ``key`` determines all of ``scheme`` and no proper subset does."""
    fds = list(fds)
    scheme = set(scheme)
    key = set(_as_tuple(key))
    if not key <= scheme:
        raise SchemaError(f"key candidate {sorted(key)} is not inside the scheme")
    if not scheme <= attribute_closure(fds, key):
        return False
    # superkeys are upward closed, so checking the maximal proper subsets suffices
    return not any(scheme <= attribute_closure(fds, key - {a}) for a in key)


def find_key(fds, scheme: Sequence[str]) -> tuple[str, ...]:
    """First key by increasing size, then lexicographically in scheme order."""
    fds = list(fds)
    scheme = tuple(scheme)
    for size in range(len(scheme) + 1):
        for cand in combinations(scheme, size):
            if set(scheme) <= attribute_closure(fds, cand):
                return cand
    return scheme  # unreachable: the full scheme always determines itself


def split_rhs(deps: Iterable[Dependency]) -> list[Dependency]:
    """Rewrite each dependency into single-attribute right-hand sides, dropping trivial parts."""
    out = []
    seen = set()
    for d in deps:
        for a in d.rhs:
            if a in d.lhs:
                continue
            s = Dependency(d.kind, d.lhs, (a,))
            if s not in seen:
                seen.add(s)
                out.append(s)
    return out


def decompose_4nf(scheme: Sequence[str], deps: Iterable[Dependency]) -> Decomposition:
    """Decompose ``scheme`` into a 4NF database scheme.

    The whole scheme when there are no dependencies or one dependency spans
    it.  Otherwise: singletons for attributes no dependency mentions, one
    scheme per dependency, and a key scheme when the functional dependencies
    admit a proper key not already contained in an emitted scheme.
    """
    scheme = tuple(scheme)
    if not scheme:
        raise SchemaError("cannot decompose an empty scheme")
    if len(set(scheme)) != len(scheme):
        raise SchemaError("scheme has duplicate attributes")
    deps = split_rhs(deps)
    pos = {a: i for i, a in enumerate(scheme)}
    for d in deps:
        unknown = d.attributes - set(scheme)
        if unknown:
            raise SchemaError(f"dependency {d} uses attributes outside the scheme: {sorted(unknown)}")

    def in_order(attrs):
        return tuple(sorted(set(attrs), key=pos.__getitem__))

    notes = []
    if not deps:
        notes.append("no dependencies; the scheme is already in 4NF")
        return Decomposition((scheme,), None, tuple(notes))
    for d in deps:
        if d.attributes == set(scheme):
            notes.append(f"{d} spans the whole scheme; the scheme is its own decomposition")
            return Decomposition((scheme,), None, tuple(notes))

    mentioned = set().union(*(d.attributes for d in deps)) if deps else set()
    schemes: list[tuple[str, ...]] = [(a,) for a in scheme if a not in mentioned]
    for d in deps:
        s = in_order(d.attributes)
        if s not in schemes:
            schemes.append(s)
    schemes = [s for s in schemes if not any(set(s) < set(t) for t in schemes)]

    key = None
    fds = [d for d in deps if d.kind == "FD"]
    if fds:
        cand = find_key(fds, scheme)
        if set(cand) == set(scheme):
            notes.append("the only key is the whole scheme; no key scheme emitted")
        elif any(set(cand) <= set(s) for s in schemes):
            notes.append(f"key {{{','.join(cand)}}} already lies inside an emitted scheme")
        else:
            key = in_order(cand)
            schemes.append(key)
    else:
        notes.append("no functional dependencies; no key scheme emitted")
    return Decomposition(tuple(schemes), key, tuple(notes))


def _schemes(decomposition) -> list[tuple[str, ...]]:
    if isinstance(decomposition, Decomposition):
        return list(decomposition.schemes)
    return [tuple(s) for s in decomposition]


def verify_lossless_join(r: Relation, decomposition) -> bool:
    """Instance-level check: joining the set projections gives back ``r``."""
    schemes = _schemes(decomposition)
    covered = set().union(*map(set, schemes)) if schemes else set()
    if covered != set(r.names):
        raise SchemaError(f"decomposition does not cover the scheme; missing {sorted(set(r.names) - covered)}")
    joined = project(r, schemes[0], "set")
    for s in schemes[1:]:
        joined = natural_join(joined, project(r, s, "set"))
    return joined.reorder(r.names).tuples() == r.tuples()


def preserves_fds(fds, decomposition) -> bool:
    """True iff the FDs projected onto the schemes imply every FD in ``fds``."""
    fds = _fds(fds)
    schemes = [set(s) for s in _schemes(decomposition)]
    for d in fds:
        z = set(d.lhs)
        changed = True
        while changed:
            changed = False
            for s in schemes:
                gain = (attribute_closure(fds, z & s) & s) - z
                if gain:
                    z |= gain
                    changed = True
        if not z.issuperset(d.rhs):
            return False
    return True
