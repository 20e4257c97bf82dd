"""Clique priors and local characteristics estimated from data."""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from ..exceptions import SchemaError, UndefinedFrequencyError
from ..network import ConditionalTable
from ..potential import CliquePotential
from ..relation import Relation, project


def frequency_prior(relation: Relation, clique: Sequence[str]) -> CliquePotential:
    """Multiset projection onto ``clique`` normalized by the row count.

    Every sample row is weighted equally.  Clique attributes are laid out in
    the relation's scheme order.
    """
    n = len(relation)
    if n == 0:
        raise UndefinedFrequencyError("cannot build a prior from an empty relation")
    proj = project(relation, clique, "multiset")
    return CliquePotential.from_mapping(
        proj.names,
        [relation.domain(a) for a in proj.names],
        {t: c / n for t, c in proj.items()},
    )


def dirichlet_row(child_counts: Mapping, child_domain: Sequence) -> dict:
    """``(C(x, pi) + 1) / (C(pi) + V)`` for each child value ``x``."""
    child_domain = tuple(child_domain)
    v = len(child_domain)
    if v < 1:
        raise SchemaError("child domain must have at least one value")
    counts = {x: int(child_counts.get(x, 0)) for x in child_domain}
    if any(c < 0 for c in counts.values()):
        raise SchemaError("counts must be nonnegative")
    total = sum(counts.values())
    return {x: Fraction(counts[x] + 1, total + v) for x in child_domain}


def dirichlet_lc(table: ConditionalTable) -> ConditionalTable:
    """Dirichlet estimate for every parent configuration; unseen ones become uniform."""
    rows = {}
    for cfg in table.parent_configs():
        rows[cfg] = dirichlet_row(table.counts.get(cfg, {}), table.child_domain)
    return ConditionalTable(table.child, table.parents, table.child_domain, table.parent_domains, rows, dict(table.counts))


def frequency_lc(table: ConditionalTable) -> ConditionalTable:
    """The frequency estimate: the extracted table itself, UNDEFINED rows included."""
    return ConditionalTable(table.child, table.parents, table.child_domain, table.parent_domains,
                            dict(table.rows), dict(table.counts))
