"""Dense probability tables over the joint states of a clique."""
from __future__ import annotations

from itertools import product
from typing import Mapping, Sequence

import numpy as np

from .exceptions import SchemaError, ScopeError
from .encoding import encode_index


class CliquePotential:
    """Probability table over ``attrs`` stored as an array with one axis per attribute.

    Axis ``k`` is indexed by position in ``domains[k]``.
    """

    __slots__ = ("attrs", "domains", "table")

    def __init__(self, attrs: Sequence[str], domains: Sequence[Sequence], table):
        self.attrs = tuple(attrs)
        self.domains = tuple(tuple(d) for d in domains)
        if len(self.attrs) != len(self.domains):
            raise SchemaError("attrs and domains differ in length")
        table = np.asarray(table, dtype=float)
        shape = tuple(len(d) for d in self.domains)
        if table.shape != shape:
            raise SchemaError(f"table shape {table.shape} does not match domain sizes {shape}")
        if (table < 0).any():
            raise SchemaError("potential entries must be nonnegative")
        self.table = table

    @classmethod
    def from_mapping(cls, attrs, domains, probs: Mapping[tuple, float]):
        domains = [tuple(d) for d in domains]
        table = np.zeros(tuple(len(d) for d in domains))
        for cfg, p in probs.items():
            cfg = cfg if isinstance(cfg, tuple) else (cfg,)
            try:
                idx = tuple(d.index(v) for d, v in zip(domains, cfg))
            except ValueError:
                raise SchemaError(f"configuration {cfg} is outside the domains of {tuple(attrs)}") from None
            table[idx] += p
        return cls(attrs, domains, table)

    @classmethod
    def uniform(cls, attrs, domains):
        shape = tuple(len(d) for d in domains)
        return cls(attrs, domains, np.full(shape, 1.0 / max(1, int(np.prod(shape)))))

    def copy(self, table=None) -> "CliquePotential":
        return CliquePotential(self.attrs, self.domains, self.table.copy() if table is None else table)

    def total(self) -> float:
        return float(self.table.sum())

    def normalized(self) -> "CliquePotential":
        s = self.table.sum()
        if s <= 0:
            raise SchemaError(f"potential over {self.attrs} has no mass")
        return self.copy(self.table / s)

    def axes(self, attrs) -> tuple[int, ...]:
        attrs = (attrs,) if isinstance(attrs, str) else tuple(attrs)
        missing = [a for a in attrs if a not in self.attrs]
        if missing:
            raise ScopeError(f"attributes {missing} are not in clique {list(self.attrs)}")
        return tuple(self.attrs.index(a) for a in attrs)

    def marginal_array(self, attrs) -> np.ndarray:
        """Marginal table with axes in the order given by ``attrs``."""
        ax = self.axes(attrs)
        drop = tuple(i for i in range(len(self.attrs)) if i not in ax)
        m = self.table.sum(axis=drop) if drop else self.table
        kept = sorted(ax)
        return np.transpose(m, [kept.index(i) for i in ax]) if ax else np.asarray(m)

    def marginal(self, attrs) -> "CliquePotential":
        ax = self.axes(attrs)
        attrs = tuple(self.attrs[i] for i in ax)
        return CliquePotential(attrs, [self.domains[i] for i in ax], self.marginal_array(attrs))

    def probability(self, assignment: Mapping) -> float:
        attrs = tuple(assignment)
        m = self.marginal_array(attrs)
        idx = tuple(self.domains[self.attrs.index(a)].index(assignment[a]) for a in attrs)
        return float(m[idx])

    def items(self, nonzero=True):
        """(configuration, probability) pairs in index order."""
        for idx in product(*(range(len(d)) for d in self.domains)):
            p = float(self.table[idx])
            if p or not nonzero:
                yield tuple(d[i] for d, i in zip(self.domains, idx)), p

    def by_index(self) -> dict[str, float]:
        """Nonzero states keyed by their hexadecimal index."""
        return {encode_index(cfg, self.domains): p for cfg, p in self.items()}

    def as_dict(self) -> dict[tuple, float]:
        return dict(self.items())

    def __repr__(self):
        return f"CliquePotential({list(self.attrs)}, states={int(np.count_nonzero(self.table))})"
