from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from ..exceptions import ConfigurationError
from ..network import ConditionalTable
from .local import dirichlet_lc, frequency_lc
from .nnor import DEFAULT_CAP, KMap, NNORReport, nnor_learn
from .sop import SopFormula

METHODS = ("frequency", "dirichlet", "nnor")


@dataclass
class LearnedTable:
    table: ConditionalTable
    method: str
    provenance: dict[tuple, str] = field(default_factory=dict)
    formula: SopFormula | None = None
    report: NNORReport | None = None

    @property
    def complete(self) -> bool:
        return not self.table.undefined()


def _nnor_binary(table: ConditionalTable, binary_slice: bool, cap: int):
    target = table.child_domain[-1]
    formula = None
    report = None
    full = KMap.from_table(table, target)
    provenance = {}
    if binary_slice and not full.is_binary():
        sliced, formula, report = nnor_learn(KMap.from_table(table, target, binary_slice=True), cap=cap)
        provenance.update(report.provenance)
        seeded = full.with_values({c: v for c, v in sliced.cells.items()})
        done, _, rest = nnor_learn(seeded, cap=cap)
        for c, p in rest.provenance.items():
            provenance.setdefault(c, p)
    else:
        done, formula, report = nnor_learn(full, cap=cap)
        provenance.update(report.provenance)
    other = table.child_domain[0]
    rows = {cfg: {other: 1 - v, target: v} for cfg, v in done.cells.items()}
    return rows, provenance, formula, report


def _nnor_multi(table: ConditionalTable, cap: int):
    per_value = {}
    provenance = {}
    for x in table.child_domain:
        done, _, rep = nnor_learn(KMap.from_table(table, x), cap=cap, use_or=False)
        per_value[x] = done.cells
        for c, p in rep.provenance.items():
            if p != "data" or c not in provenance:
                provenance[c] = p
    rows = {}
    for cfg in product(*table.parent_domains):
        raw = {x: per_value[x][cfg] for x in table.child_domain}
        s = sum(raw.values())
        if s == 0:
            rows[cfg] = {x: Fraction(1, len(raw)) for x in raw}
        else:
            rows[cfg] = {x: v / s for x, v in raw.items()}
    return rows, provenance


def learn_table(table: ConditionalTable, method: str = "frequency", binary_slice: bool = False,
                cap: int = DEFAULT_CAP) -> LearnedTable:
    """Estimate ``P(child | parents)`` with the chosen method.

    ``frequency`` leaves unseen rows UNDEFINED, ``dirichlet`` makes them
    uniform and ``nnor`` completes them from neighbouring rows.
    """
    if method not in METHODS:
        raise ConfigurationError(f"method must be one of {METHODS}, got {method!r}")
    seen = {cfg for cfg, row in table.rows.items() if row is not None}
    if method == "frequency":
        out = frequency_lc(table)
        return LearnedTable(out, method, {cfg: "data" for cfg in seen})
    if method == "dirichlet":
        out = dirichlet_lc(table)
        return LearnedTable(out, method, {cfg: ("data" if cfg in seen else "dirichlet") for cfg in out.rows})
    if not seen:
        # nothing to generalise from; fall back to the uniform Dirichlet row
        out = dirichlet_lc(table)
        return LearnedTable(out, method, {cfg: "dirichlet" for cfg in out.rows})
    if len(table.child_domain) == 2:
        rows, provenance, formula, report = _nnor_binary(table, binary_slice, cap)
    else:
        rows, provenance = _nnor_multi(table, cap)
        formula = report = None
    out = ConditionalTable(table.child, table.parents, table.child_domain, table.parent_domains, rows, dict(table.counts))
    return LearnedTable(out, method, provenance, formula, report)
