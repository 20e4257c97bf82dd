"""Belief extraction, Jeffrey updating and propagation over a junction tree.

Propagation keeps the model calibrated: each constraint is imposed on the
first clique covering it, then the change travels through the separators by
Jeffrey updates (collect to the root, distribute back).  A brute-force
oracle over the universal relation is provided for validation.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

from ._order import natural_key
from .decompose import JunctionTree
from .exceptions import ConvergenceError, IncompatibleEvidenceError, SchemaError, ScopeError
from .learn.local import frequency_prior
from .network import ConditionalTable, MarginalConstraint
from .potential import CliquePotential
from .relation import FrequencyTable, Relation

__all__ = [
    "JeffreyConstraint",
    "CalibratedModel",
    "hard_evidence",
    "belief_extract",
    "jeffrey_update",
    "propagate",
    "query",
    "oracle_query",
    "frequency_model",
    "product_model",
]

JeffreyConstraint = MarginalConstraint


def hard_evidence(assignment: Mapping | None = None, **kw) -> list[JeffreyConstraint]:
    """One point-mass constraint per observed attribute, in the given order."""
    assignment = {**(assignment or {}), **kw}
    return [JeffreyConstraint.point({a: v}) for a, v in assignment.items()]


def _target_array(q: JeffreyConstraint, domains: Sequence[Sequence]) -> np.ndarray:
    arr = np.zeros(tuple(len(d) for d in domains))
    for cfg, p in q.target.items():
        try:
            idx = tuple(tuple(d).index(v) for d, v in zip(domains, cfg))
        except ValueError:
            raise SchemaError(f"constraint value {cfg} is outside the domain of {q.attrs}") from None
        arr[idx] += float(p)
    return arr


def belief_extract(p: CliquePotential, attrs) -> FrequencyTable:
    """Marginal of ``p`` over ``attrs``, every configuration listed."""
    attrs = (attrs,) if isinstance(attrs, str) else tuple(attrs)
    m = p.marginal(attrs)
    return FrequencyTable(m.attrs, dict(m.items(nonzero=False)))


def _jeffrey(p: CliquePotential, attrs, target: np.ndarray) -> CliquePotential:
    ax = p.axes(attrs)
    current = p.marginal_array(attrs)
    bad = (target > 0) & (current <= 0)
    if bad.any():
        idx = tuple(int(i) for i in np.argwhere(bad)[0])
        cfg = tuple(p.domains[a][i] for a, i in zip(ax, idx))
        raise IncompatibleEvidenceError(
            f"evidence puts mass on {dict(zip(attrs, cfg))}, which has zero prior probability"
        )
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(current > 0, target / np.where(current > 0, current, 1), 0.0)
    # broadcast ratio (axes ordered as attrs) against the clique table
    order = np.argsort(ax)
    ratio = np.transpose(ratio, order) if len(ax) > 1 else ratio
    shape = [1] * len(p.attrs)
    for a in sorted(ax):
        shape[a] = len(p.domains[a])
    return p.copy(p.table * ratio.reshape(shape))


def jeffrey_update(p: CliquePotential, q: JeffreyConstraint) -> CliquePotential:
    """Impose marginal ``q`` on ``p`` keeping conditionals given ``q.attrs`` fixed."""
    p.axes(q.attrs)
    domains = [p.domains[p.attrs.index(a)] for a in q.attrs]
    return _jeffrey(p, q.attrs, _target_array(q, domains))


@dataclass(frozen=True)
class CalibratedModel:
    tree: JunctionTree
    potentials: tuple[CliquePotential, ...]

    def __post_init__(self):
        object.__setattr__(self, "potentials", tuple(self.potentials))
        if len(self.potentials) != len(self.tree.cliques):
            raise SchemaError("one potential per clique is required")
        for c, p in zip(self.tree.cliques, self.potentials):
            if set(c) != set(p.attrs):
                raise SchemaError(f"potential over {p.attrs} does not match clique {c}")

    @property
    def cliques(self):
        return self.tree.cliques

    def clique_order(self) -> list[int]:
        return _clique_order(self.tree)

    def route(self, attrs) -> int:
        """First clique (lexicographically) containing ``attrs``."""
        return _route(self.tree, attrs)

    def root(self) -> int:
        return self.clique_order()[0] if self.cliques else -1

    def potential_for(self, attrs) -> CliquePotential:
        return self.potentials[self.route(attrs)]

    def disagreement(self) -> float:
        worst = 0.0
        for i, j in self.tree.edges:
            sep = self.tree.separator(i, j)
            a = self.potentials[i].marginal_array(sep)
            b = self.potentials[j].marginal_array(sep)
            worst = max(worst, float(np.max(np.abs(a - b))) if np.size(a) else 0.0)
        return worst

    def marginal(self, attrs) -> FrequencyTable:
        return belief_extract(self.potentials[self.route(attrs)], attrs)


def _clique_order(tree: JunctionTree) -> list[int]:
    """Clique indices sorted lexicographically by member names."""
    return sorted(range(len(tree.cliques)),
                  key=lambda i: sorted(natural_key(a) for a in tree.cliques[i]))


def _route(tree: JunctionTree, attrs) -> int:
    need = set((attrs,) if isinstance(attrs, str) else attrs)
    for i in _clique_order(tree):
        if need <= set(tree.cliques[i]):
            return i
    raise ScopeError(f"no clique contains {sorted(need, key=natural_key)}")


def _schedule(tree: JunctionTree, root: int) -> list[tuple[int, int]]:
    """Collect edges (child -> parent, leaves first) for a tree rooted at ``root``."""
    order = []
    parent = {root: None}
    stack = [root]
    while stack:
        i = stack.pop()
        order.append(i)
        for j in tree.neighbors(i):
            if j not in parent:
                parent[j] = i
                stack.append(j)
    if len(order) != len(tree.cliques):
        raise SchemaError("junction tree is not connected")
    return [(i, parent[i]) for i in reversed(order) if parent[i] is not None]


def _absorb(pots: list[CliquePotential], tree: JunctionTree, src: int, dst: int):
    sep = tree.separator(src, dst)
    if not sep:
        return
    msg = pots[src].marginal_array(sep)
    if np.array_equal(msg, pots[dst].marginal_array(sep)):
        return
    pots[dst] = _jeffrey(pots[dst], sep, msg)


def _distribute(pots, tree, source):
    for child, parent in reversed(_schedule(tree, source)):
        _absorb(pots, tree, parent, child)


def _sweep(pots, tree, root):
    collect = _schedule(tree, root)
    for child, parent in collect:
        _absorb(pots, tree, child, parent)
    for child, parent in reversed(collect):
        _absorb(pots, tree, parent, child)


def _disagreement(pots, tree) -> float:
    return CalibratedModel(tree, pots).disagreement()


def _calibrate(pots, tree, root, tolerance, max_sweeps):
    for _ in range(max_sweeps):
        if _disagreement(pots, tree) < tolerance:
            return
        _sweep(pots, tree, root)
    if _disagreement(pots, tree) >= tolerance:
        raise ConvergenceError(f"separators still disagree after {max_sweeps} sweeps")


def propagate(model: CalibratedModel, constraints: Iterable[JeffreyConstraint] = (),
              tolerance: float = 1e-9, max_sweeps: int = 100) -> CalibratedModel:
    """Apply ``constraints`` in order and return a calibrated model.

    Each constraint updates its clique by Jeffrey's rule and the change is
    distributed outward from that clique before the next constraint is
    applied, so every message is absolutely continuous with respect to its
    receiver.  Collecting toward the root first would send stale separator
    marginals into the updated clique and undo the constraint.
    """
    if tolerance <= 0:
        raise SchemaError("tolerance must be positive")
    tree = model.tree
    pots = [p.normalized() for p in model.potentials]
    if not pots:
        return model
    root = model.root()
    _calibrate(pots, tree, root, tolerance, max_sweeps)
    for q in constraints:
        i = model.route(q.attrs)
        pots[i] = jeffrey_update(pots[i], q)
        _distribute(pots, tree, i)
        _calibrate(pots, tree, root, tolerance, max_sweeps)
    pots = [p.normalized() for p in pots]
    return CalibratedModel(tree, pots)


def _as_targets(targets) -> list[tuple[str, ...]]:
    out = []
    for t in targets:
        out.append((t,) if isinstance(t, str) else tuple(t))
    return out


def query(model: CalibratedModel, constraints: Iterable[JeffreyConstraint], targets,
          tolerance: float = 1e-9, max_sweeps: int = 100) -> dict[tuple[str, ...], FrequencyTable]:
    """Propagate the constraints, then read the marginal of each target."""
    targets = _as_targets(targets)
    for t in targets:
        model.route(t)
    post = propagate(model, constraints, tolerance, max_sweeps)
    return {t: post.marginal(t) for t in targets}


def oracle_query(universal: Relation, constraints: Iterable[JeffreyConstraint], targets) -> dict[tuple[str, ...], FrequencyTable]:
    """Exact answers from the universal relation.

    Rows are weighted by multiplicity; each constraint reweights the rows by
    ``Q(x) / F(x)`` in turn (hard evidence reduces to selection).
    """
    targets = _as_targets(targets)
    rows = list(universal.items())
    weights = np.array([float(c) for _, c in rows])
    if weights.sum() <= 0:
        raise IncompatibleEvidenceError("the universal relation is empty")
    for q in constraints:
        names = universal.resolve(q.attrs)
        if len(names) != len(q.attrs):
            raise SchemaError(f"constraint attributes {q.attrs} repeat")
        pos = [universal.position(a) for a in q.attrs]
        keys = [tuple(t[i] for i in pos) for t, _ in rows]
        for cfg in q.target:
            for a, v in zip(q.attrs, cfg):
                universal.attribute(a).index(v)
        mass: dict[tuple, float] = {}
        for k, w in zip(keys, weights):
            mass[k] = mass.get(k, 0.0) + w
        total = weights.sum()
        for cfg, p in q.target.items():
            if p > 0 and mass.get(cfg, 0.0) <= 0:
                raise IncompatibleEvidenceError(
                    f"evidence puts mass on {dict(zip(q.attrs, cfg))}, which no remaining row supports"
                )
        weights = np.array([
            w * float(q.target.get(k, 0)) / (mass[k] / total) if mass[k] > 0 else 0.0
            for k, w in zip(keys, weights)
        ])
    total = weights.sum()
    out = {}
    for t in targets:
        names = universal.resolve(t)
        if len(names) != len(t):
            raise SchemaError(f"target {t} repeats an attribute")
        pos = [universal.position(a) for a in t]
        acc = {cfg: 0.0 for cfg in product(*(universal.domain(a) for a in t))}
        for (row, _), w in zip(rows, weights):
            acc[tuple(row[i] for i in pos)] += float(w / total)
        out[t] = FrequencyTable(t, acc)
    return out


def frequency_model(relation: Relation, tree: JunctionTree) -> CalibratedModel:
    """Clique priors read directly from the data (every row equally likely)."""
    pots = []
    for c in tree.cliques:
        p = frequency_prior(relation, c)
        pots.append(p)
    cliques = tuple(p.attrs for p in pots)
    return CalibratedModel(JunctionTree(cliques, tree.edges), pots)


def _lc_array(table: ConditionalTable, attrs, domains) -> np.ndarray:
    """Conditional table laid out over ``attrs`` (its family) as a dense array."""
    arr = np.zeros(tuple(len(d) for d in domains))
    fam = table.parents + (table.child,)
    perm = [attrs.index(a) for a in fam]
    for cfg in product(*table.parent_domains):
        row = table.rows.get(cfg)
        if row is None:
            raise SchemaError(f"P({table.child} | {dict(zip(table.parents, cfg))}) is undefined")
        for x, p in row.items():
            vals = cfg + (x,)
            idx = [0] * len(attrs)
            for k, v in zip(perm, vals):
                idx[k] = domains[k].index(v)
            arr[tuple(idx)] = float(p)
    return arr


def product_model(tree: JunctionTree, tables: Sequence[ConditionalTable], domains: Mapping[str, Sequence]) -> CalibratedModel:
    """Calibrate the joint defined by a complete set of local characteristics.

    Each table is multiplied into the first clique holding its family; a
    sum-product pass over the tree then yields exact clique marginals.
    """
    cliques = [tuple(c) for c in tree.cliques]
    tabs = [np.ones(tuple(len(domains[a]) for a in c)) for c in cliques]
    for t in tables:
        fam = t.parents + (t.child,)
        i = _route(tree, fam)
        c = cliques[i]
        sub = tuple(a for a in c if a in fam)
        arr = _lc_array(t, sub, [tuple(domains[a]) for a in sub])
        shape = [len(domains[a]) if a in fam else 1 for a in c]
        tabs[i] = tabs[i] * arr.reshape(shape)
    seps = {}
    pots = [CliquePotential(c, [domains[a] for a in c], tab) for c, tab in zip(cliques, tabs)]
    root = CalibratedModel(tree, pots).root()

    def pass_message(src, dst):
        sep = tree.separator(src, dst)
        key = frozenset((src, dst))
        new = pots[src].marginal_array(sep)
        old = seps.get(key, np.ones_like(new))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(old > 0, new / np.where(old > 0, old, 1), 0.0)
        seps[key] = new
        ax = [pots[dst].attrs.index(a) for a in sep]
        order = np.argsort(ax)
        ratio = np.transpose(ratio, order) if len(ax) > 1 else ratio
        shape = [len(d) if k in ax else 1 for k, d in enumerate(pots[dst].domains)]
        pots[dst] = pots[dst].copy(pots[dst].table * ratio.reshape(shape))

    collect = _schedule(tree, root)
    for child, parent in collect:
        pass_message(child, parent)
    for child, parent in reversed(collect):
        pass_message(parent, child)
    total = pots[root].total()
    if total <= 0:
        raise SchemaError("local characteristics define an empty joint distribution")
    return CalibratedModel(tree, [p.normalized() for p in pots])
