"""Nearest-neighbour completion of K-maps with an Occam's-razor tie-break.

Unseen cells are filled in three phases:

1. a cell whose known neighbours all agree takes their value (most known
   neighbours first, ties by cell position), repeated to a fixpoint;
2. for a 0/1 map over binary parents, the remaining cells get the joint 0/1
   assignment whose minimal sum-of-products formula is least complex
   (ties: fewer ones, then lexicographic);
3. anything still unseen takes the mean of its known neighbours.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

from ..exceptions import CapacityError, NoDataError, SchemaError
from ..network import ConditionalTable
from .sop import SopFormula, sop_minimize

DEFAULT_CAP = 2**16


@dataclass
class KMap:
    """Values over the parent configurations; ``None`` marks an unseen cell.

    Two cells are adjacent when they differ in one attribute by one step in
    that attribute's domain order.
    """

    parents: tuple[str, ...]
    domains: tuple[tuple, ...]
    cells: dict[tuple, object]

    def __post_init__(self):
        self.parents = tuple(self.parents)
        self.domains = tuple(tuple(d) for d in self.domains)
        expected = set(product(*self.domains))
        if set(self.cells) != expected:
            raise SchemaError("K-map cells must cover the parent domain product exactly")
        for c, v in self.cells.items():
            if v is not None and not 0 <= v <= 1:
                raise SchemaError(f"cell {c} holds {v}, outside [0, 1]")

    @classmethod
    def from_table(cls, table: ConditionalTable, value=None, binary_slice: bool = False) -> "KMap":
        """Map of ``P(child = value | parents)``; ``value`` defaults to the last child value.

        ``binary_slice`` keeps only the first and last value of every parent domain.
        """
        if value is None:
            value = table.child_domain[-1]
        domains = table.parent_domains
        if binary_slice:
            domains = tuple((d[0], d[-1]) if len(d) > 2 else d for d in domains)
        cells = {}
        for cfg in product(*domains):
            row = table.rows.get(cfg)
            cells[cfg] = None if row is None else row.get(value, 0)
        return cls(table.parents, domains, cells)

    def key(self, cell) -> tuple[int, ...]:
        return tuple(d.index(v) for d, v in zip(self.domains, cell))

    def neighbors(self, cell) -> list[tuple]:
        out = []
        for k, (d, v) in enumerate(zip(self.domains, cell)):
            i = d.index(v)
            for j in (i - 1, i + 1):
                if 0 <= j < len(d):
                    out.append(cell[:k] + (d[j],) + cell[k + 1:])
        return out

    def unseen(self) -> list[tuple]:
        return sorted((c for c, v in self.cells.items() if v is None), key=self.key)

    def is_deterministic(self) -> bool:
        return all(v in (0, 1) for v in self.cells.values() if v is not None)

    def is_binary(self) -> bool:
        return all(len(d) == 2 for d in self.domains)

    def with_values(self, values: Mapping[tuple, object]) -> "KMap":
        cells = dict(self.cells)
        cells.update(values)
        return KMap(self.parents, self.domains, cells)

    def truth_table(self) -> dict[tuple[int, ...], int]:
        if not self.is_binary():
            raise SchemaError("truth tables need binary parents")
        out = {}
        for c, v in self.cells.items():
            if v is None or v not in (0, 1):
                raise SchemaError(f"cell {c} is not 0/1")
            out[self.key(c)] = int(v)
        return out

    def formula(self) -> SopFormula:
        return sop_minimize(self.truth_table(), self.parents)


@dataclass
class NNORReport:
    provenance: dict[tuple, str] = field(default_factory=dict)
    fill_order: list[tuple] = field(default_factory=list)
    or_cells: tuple[tuple, ...] = ()
    or_scores: dict[tuple, int] = field(default_factory=dict)
    or_choice: tuple | None = None


def _mean(values):
    if all(isinstance(v, (int, Fraction)) for v in values):
        return Fraction(sum(values), len(values))
    return sum(values) / len(values)


def score_assignments(kmap: KMap, cells: Sequence[tuple] | None = None) -> dict[tuple, SopFormula]:
    """Minimal formula for every joint 0/1 assignment of ``cells`` (default: all unseen)."""
    cells = kmap.unseen() if cells is None else list(cells)
    out = {}
    for bits in product((0, 1), repeat=len(cells)):
        out[bits] = kmap.with_values(dict(zip(cells, bits))).formula()
    return out


def nnor_learn(kmap: KMap, cap: int = DEFAULT_CAP, tol: float = 1e-9, use_or: bool = True):
    """Complete ``kmap``; returns ``(completed map, formula or None, report)``.

    The formula is the minimal SOP of the completed map when it is a 0/1 map
    over binary parents.  Seen cells are never modified.
    """
    if all(v is None for v in kmap.cells.values()):
        raise NoDataError("every K-map cell is unseen")
    report = NNORReport()
    known = {c: v for c, v in kmap.cells.items() if v is not None}
    for c in known:
        report.provenance[c] = "data"
    deterministic = kmap.is_deterministic()

    def agree(values):
        if deterministic:
            return len(set(values)) == 1
        return max(values) - min(values) <= tol

    # phase 1
    while True:
        best = None
        for c in kmap.cells:
            if c in known:
                continue
            vals = [known[n] for n in kmap.neighbors(c) if n in known]
            if vals and agree(vals):
                rank = (-len(vals), kmap.key(c))
                if best is None or rank < best[0]:
                    best = (rank, c, vals)
        if best is None:
            break
        _, c, vals = best
        known[c] = vals[0] if len(set(vals)) == 1 else _mean(vals)
        report.provenance[c] = "nn-fill"
        report.fill_order.append(c)

    remaining = sorted((c for c in kmap.cells if c not in known), key=kmap.key)

    # phase 2
    if remaining and use_or and deterministic and kmap.is_binary():
        if 2 ** len(remaining) > cap:
            raise CapacityError(f"{2 ** len(remaining)} assignments exceed the cap of {cap}")
        partial = kmap.with_values(known)
        scores = score_assignments(partial, remaining)
        choice = min(scores, key=lambda bits: (scores[bits].complexity, sum(bits), bits))
        report.or_cells = tuple(remaining)
        report.or_scores = {bits: f.complexity for bits, f in scores.items()}
        report.or_choice = choice
        for c, b in zip(remaining, choice):
            known[c] = b
            report.provenance[c] = "or-fill"
            report.fill_order.append(c)
        remaining = []

    # phase 3
    while remaining:
        best = None
        for c in remaining:
            vals = [known[n] for n in kmap.neighbors(c) if n in known]
            if vals:
                rank = (-len(vals), kmap.key(c))
                if best is None or rank < best[0]:
                    best = (rank, c, vals)
        _, c, vals = best
        known[c] = _mean(vals)
        report.provenance[c] = "mean-fill"
        report.fill_order.append(c)
        remaining.remove(c)

    done = kmap.with_values(known)
    formula = done.formula() if done.is_binary() and done.is_deterministic() else None
    return done, formula, report
