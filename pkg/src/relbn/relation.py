"""Relations over finite symbolic domains with tuple multiplicities.

A :class:`Relation` is an immutable multiset of tuples.  Sample tables carry
an implicit count of one per row; statistical tables carry one row per value
combination with an integer count.  All operators here are pure.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

from .exceptions import SchemaError, UndefinedFrequencyError

__all__ = [
    "Attribute",
    "Relation",
    "FrequencyTable",
    "select",
    "project",
    "natural_join",
    "frequency",
    "cond_frequency",
    "fd_holds",
    "md_holds",
    "pd_holds",
    "pd_holds_wrt",
]


@dataclass(frozen=True)
class Attribute:
    """A named attribute with an ordered, finite domain.

    Domain order matters: it fixes the index encoding and K-map adjacency.
    """

    name: str
    domain: tuple

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(self.domain))
        if not self.name:
            raise SchemaError("attribute name must be nonempty")
        if not self.domain:
            raise SchemaError(f"attribute {self.name!r} has an empty domain")
        if len(set(self.domain)) != len(self.domain):
            raise SchemaError(f"attribute {self.name!r} has duplicate domain values")

    @property
    def size(self) -> int:
        return len(self.domain)

    def index(self, value) -> int:
        try:
            return self.domain.index(value)
        except ValueError:
            raise SchemaError(
                f"value {value!r} is not in the domain of {self.name!r} {list(self.domain)}"
            ) from None


class Relation:
    """Immutable multiset of tuples over an ordered scheme.

    >>> r = Relation.from_rows(["A", "B"], [(0, 1), (0, 1), (1, 0)])
    >>> len(r), r.distinct_count
    (3, 2)
    """

    __slots__ = ("scheme", "_counts", "_pos")

    def __init__(self, scheme: Iterable[Attribute], rows: Iterable[Sequence] = (), counts=None):
        scheme = tuple(scheme)
        names = [a.name for a in scheme]
        if len(set(names)) != len(names):
            raise SchemaError(f"duplicate attribute names in scheme {names}")
        self.scheme = scheme
        self._pos = {a.name: i for i, a in enumerate(scheme)}
        merged: dict[tuple, int] = {}
        rows = list(rows)
        if counts is not None:
            counts = list(counts)
            if len(counts) != len(rows):
                raise SchemaError("counts and rows differ in length")
        for i, row in enumerate(rows):
            row = tuple(row)
            if len(row) != len(scheme):
                raise SchemaError(f"row {i + 1} has {len(row)} values, scheme has {len(scheme)}")
            for attr, value in zip(scheme, row):
                attr.index(value)
            c = 1 if counts is None else counts[i]
            if int(c) != c or c < 0:
                raise SchemaError(f"row {i + 1}: multiplicity must be a nonnegative integer, got {c!r}")
            if c:
                merged[row] = merged.get(row, 0) + int(c)
        self._counts = merged

    @classmethod
    def from_rows(cls, names, rows, domains: Mapping[str, Sequence] | None = None, counts=None):
        """Build a relation, defaulting each domain to values in order of first appearance."""
        rows = [tuple(r) for r in rows]
        domains = dict(domains or {})
        scheme = []
        for j, name in enumerate(names):
            if name in domains:
                dom = tuple(domains[name])
            else:
                dom = tuple(dict.fromkeys(r[j] for r in rows))
            scheme.append(Attribute(name, dom))
        return cls(scheme, rows, counts)

    @classmethod
    def _from_counts(cls, scheme, counts: Mapping[tuple, int]):
        rel = cls.__new__(cls)
        rel.scheme = tuple(scheme)
        rel._pos = {a.name: i for i, a in enumerate(rel.scheme)}
        rel._counts = {k: v for k, v in counts.items() if v}
        return rel

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.scheme)

    def attribute(self, name) -> Attribute:
        try:
            return self.scheme[self._pos[name]]
        except KeyError:
            raise SchemaError(f"unknown attribute {name!r}; scheme is {list(self.names)}") from None

    def domain(self, name) -> tuple:
        return self.attribute(name).domain

    @property
    def domains(self) -> dict[str, tuple]:
        return {a.name: a.domain for a in self.scheme}

    def position(self, name) -> int:
        self.attribute(name)
        return self._pos[name]

    def resolve(self, attrs) -> tuple[str, ...]:
        """Validate ``attrs`` and return them in scheme order."""
        if isinstance(attrs, str):
            attrs = (attrs,)
        attrs = set(attrs)
        for a in attrs:
            self.attribute(a)
        return tuple(n for n in self.names if n in attrs)

    def counts(self) -> dict[tuple, int]:
        return dict(self._counts)

    def items(self):
        """Distinct tuples with their multiplicities, in first-insertion order."""
        return self._counts.items()

    def tuples(self) -> set[tuple]:
        return set(self._counts)

    @property
    def distinct_count(self) -> int:
        return len(self._counts)

    def __len__(self):
        return sum(self._counts.values())

    def __iter__(self):
        return iter(self._counts)

    def __contains__(self, row):
        return tuple(row) in self._counts

    def __eq__(self, other):
        if not isinstance(other, Relation):
            return NotImplemented
        return self.scheme == other.scheme and self._counts == other._counts

    def __hash__(self):
        return hash((self.scheme, frozenset(self._counts.items())))

    def __repr__(self):
        return f"Relation({list(self.names)}, distinct={self.distinct_count}, total={len(self)})"

    def as_set(self) -> "Relation":
        return Relation._from_counts(self.scheme, {t: 1 for t in self._counts})

    def reorder(self, names) -> "Relation":
        names = tuple(names)
        if set(names) != set(self.names) or len(names) != len(self.names):
            raise SchemaError(f"reorder needs a permutation of {list(self.names)}")
        idx = [self._pos[n] for n in names]
        scheme = [self.scheme[i] for i in idx]
        return Relation._from_counts(scheme, {tuple(t[i] for i in idx): c for t, c in self._counts.items()})

    def _getter(self, names):
        idx = [self._pos[n] for n in names]
        return lambda t: tuple(t[i] for i in idx)


@dataclass(frozen=True)
class FrequencyTable:
    """Distribution over the configurations of ``attrs``; absent entries are zero."""

    attrs: tuple[str, ...]
    entries: Mapping[tuple, object] = field(default_factory=dict)

    def __getitem__(self, config):
        if not isinstance(config, tuple):
            config = (config,)
        return self.entries.get(config, 0)

    def get(self, assignment: Mapping):
        return self[tuple(assignment[a] for a in self.attrs)]

    def total(self):
        return sum(self.entries.values())

    def items(self):
        return self.entries.items()

    def nonzero(self) -> dict:
        return {k: v for k, v in self.entries.items() if v}


def _check_assignment(r: Relation, assignment: Mapping) -> list[tuple[int, object]]:
    out = []
    for name, value in assignment.items():
        r.attribute(name).index(value)
        out.append((r.position(name), value))
    return out


def select(r: Relation, assignment: Mapping | None = None, **kw) -> Relation:
    """Rows matching every assigned attribute; multiplicities are kept."""
    assignment = {**(assignment or {}), **kw}
    checks = _check_assignment(r, assignment)
    kept = {t: c for t, c in r.items() if all(t[i] == v for i, v in checks)}
    return Relation._from_counts(r.scheme, kept)


def project(r: Relation, attrs, mode: str = "set") -> Relation:
    """Project onto ``attrs`` (returned in scheme order).

    ``mode="multiset"`` sums multiplicities per partial tuple and preserves
    the total count; ``mode="set"`` keeps each distinct partial tuple once.
    """
    if mode not in ("set", "multiset"):
        raise ValueError(f"mode must be 'set' or 'multiset', got {mode!r}")
    names = r.resolve(attrs)
    get = r._getter(names)
    acc: dict[tuple, int] = defaultdict(int)
    for t, c in r.items():
        acc[get(t)] += c
    if mode == "set":
        acc = {k: 1 for k in acc}
    return Relation._from_counts([r.attribute(n) for n in names], acc)


def natural_join(r: Relation, s: Relation) -> Relation:
    """Set-semantic natural join; result scheme is r's attributes then s's new ones."""
    shared = [n for n in r.names if n in s._pos]
    for n in shared:
        if r.attribute(n) != s.attribute(n):
            raise SchemaError(f"attribute {n!r} is declared with different domains in the joined relations")
    extra = [n for n in s.names if n not in r._pos]
    r_key = r._getter(shared)
    s_key = s._getter(shared)
    s_extra = s._getter(extra)
    index: dict[tuple, list[tuple]] = defaultdict(list)
    for t in s:
        index[s_key(t)].append(s_extra(t))
    out = {}
    for t in r:
        for rest in index.get(r_key(t), ()):
            out[t + rest] = 1
    scheme = list(r.scheme) + [s.attribute(n) for n in extra]
    return Relation._from_counts(scheme, out)


def _marginal_counts(r: Relation, names) -> Counter:
    get = r._getter(names)
    acc = Counter()
    for t, c in r.items():
        acc[get(t)] += c
    return acc


def frequency(r: Relation, attrs) -> FrequencyTable:
    """Relative frequency of each value combination of ``attrs`` (exact fractions)."""
    names = r.resolve(attrs)
    n = len(r)
    if n == 0:
        raise UndefinedFrequencyError("frequency of an empty relation is undefined")
    return FrequencyTable(names, {k: Fraction(c, n) for k, c in _marginal_counts(r, names).items()})


def cond_frequency(r: Relation, attrs, given: Mapping) -> FrequencyTable:
    """Frequency of ``attrs`` among the rows selected by ``given``."""
    sub = select(r, given)
    if len(sub) == 0:
        raise UndefinedFrequencyError(f"no rows satisfy the condition {dict(given)}")
    return frequency(sub, attrs)


def fd_holds(r: Relation, lhs, rhs) -> bool:
    """True iff any two rows agreeing on ``lhs`` agree on ``rhs``."""
    x = r._getter(r.resolve(lhs))
    y = r._getter(r.resolve(rhs))
    seen: dict[tuple, tuple] = {}
    for t in r:
        prev = seen.setdefault(x(t), y(t))
        if prev != y(t):
            return False
    return True


def _split(r: Relation, lhs, rhs):
    xs = r.resolve(lhs)
    ys = tuple(n for n in r.resolve(rhs) if n not in xs)
    zs = tuple(n for n in r.names if n not in xs and n not in ys)
    return xs, ys, zs


def md_holds(r: Relation, lhs, rhs) -> bool:
    """Multivalued dependency test on the distinct tuples of ``r``.

    Equivalent to the swap-tuple condition: within every ``lhs`` group the
    observed (rhs, rest) pairs must form a full cross product.
    """
    xs, ys, zs = _split(r, lhs, rhs)
    gx, gy, gz = r._getter(xs), r._getter(ys), r._getter(zs)
    groups: dict[tuple, set] = defaultdict(set)
    for t in r:
        groups[gx(t)].add((gy(t), gz(t)))
    for pairs in groups.values():
        ys_seen = {p[0] for p in pairs}
        zs_seen = {p[1] for p in pairs}
        if len(pairs) != len(ys_seen) * len(zs_seen):
            return False
    return True


def _pd_counts(r: Relation, xs, ys, zs) -> bool:
    n_x = _marginal_counts(r, xs)
    n_xy = _marginal_counts(r, xs + ys)
    n_xz = _marginal_counts(r, xs + zs)
    n_xyz = _marginal_counts(r, xs + ys + zs)
    kx = len(xs)
    ys_of: dict[tuple, list] = defaultdict(list)
    zs_of: dict[tuple, list] = defaultdict(list)
    for key in n_xy:
        ys_of[key[:kx]].append(key[kx:])
    for key in n_xz:
        zs_of[key[:kx]].append(key[kx:])
    # combinations never observed count as zero, so pair every y with every z
    for x, nx in n_x.items():
        for y in ys_of[x]:
            for z in zs_of[x]:
                if n_xyz[x + y + z] * nx != n_xy[x + y] * n_xz[x + z]:
                    return False
    return True


def pd_holds(r: Relation, lhs, rhs) -> bool:
    """Probabilistic dependency ``lhs |-> rhs`` against all remaining attributes.

    Exact integer cross-multiplication of counts, no tolerance.
    """
    xs, ys, zs = _split(r, lhs, rhs)
    return _pd_counts(r, xs, ys, zs)


def pd_holds_wrt(r: Relation, lhs, rhs, rest) -> bool:
    """Like :func:`pd_holds` but tests independence from a caller-chosen ``rest`` only."""
    xs = r.resolve(lhs)
    ys = tuple(n for n in r.resolve(rhs) if n not in xs)
    zs = tuple(n for n in r.resolve(rest) if n not in xs and n not in ys)
    return _pd_counts(r, xs, ys, zs)


def domain_product(domains: Sequence[Sequence]):
    """All value combinations over ``domains``, in row-major (index) order."""
    return product(*domains)
