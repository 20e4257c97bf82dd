"""Estimator-style facade over the functional pipeline."""
from __future__ import annotations

import math
from typing import Mapping, Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import io
from .dependencies import Dependency
from .exceptions import ConfigurationError, SchemaError
from .inference import hard_evidence, propagate
from .learn import METHODS
from .network import MarginalConstraint
from .pipeline import OBJECTIVES, OPTIMIZERS, check_choice, fit_pipeline
from .relation import Relation


def _missing(v) -> bool:
    return v is None or (isinstance(v, float) and math.isnan(v))


def _plain(v):
    # numpy scalars would not compare equal to tokens read from files
    return v.item() if isinstance(v, np.generic) else v


def check_relation(X, columns: Sequence[str] | None = None,
                   domains: Mapping[str, Sequence] | None = None) -> Relation:
    """Coerce ``X`` to a :class:`Relation`.

    Accepts a relation, anything with ``columns`` and ``to_numpy`` (a data
    frame) or a 2-D array-like together with ``columns``.
    """
    if isinstance(X, Relation):
        return X
    if hasattr(X, "columns") and hasattr(X, "to_numpy"):
        names = [str(c) for c in X.columns]
        rows = X.to_numpy(dtype=object).tolist()
    else:
        rows = [list(r) for r in X]
        if columns is None:
            raise SchemaError("column names are required for array input")
        names = list(columns)
    if not rows:
        raise SchemaError("X holds no rows")
    for i, row in enumerate(rows, 1):
        if len(row) != len(names):
            raise SchemaError(f"row {i} has {len(row)} values for {len(names)} columns")
        if any(_missing(v) for v in row):
            raise SchemaError(f"row {i} has a missing value; training data must be complete")
    rows = [tuple(_plain(v) for v in row) for row in rows]
    return Relation.from_rows(names, rows, domains)


def check_dependencies(deps) -> list[Dependency]:
    if deps is None:
        return []
    if isinstance(deps, str):
        return io.parse_dependencies(deps)
    out = []
    for d in deps:
        if isinstance(d, Dependency):
            out.append(d)
        elif isinstance(d, str):
            out.extend(io.parse_dependencies(d))
        else:
            raise ConfigurationError(f"cannot read a dependency from {d!r}")
    return out


class RelationalBeliefNetwork(BaseEstimator):
    """Belief network fitted to a sample relation.

    Parameters
    ----------
    dependencies : list of Dependency or str, e.g. ``["u1,u2,u3 -> u7"]``
    domains : optional mapping attribute -> ordered values
    method : 'frequency', 'dirichlet' or 'nnor'
    objective, optimizer, seed : how the network is decomposed into cliques
    tolerance : calibration tolerance
    binary_slice : learn the binary slice of ternary parents first (nnor)
    target : attribute predicted by :meth:`predict` and :meth:`predict_proba`
    columns : column names for plain array input
    """

    def __init__(self, dependencies=None, domains=None, method="frequency", objective="states",
                 optimizer="greedy", seed=0, tolerance=1e-9, binary_slice=False, target=None,
                 columns=None):
        self.dependencies = dependencies
        self.domains = domains
        self.method = method
        self.objective = objective
        self.optimizer = optimizer
        self.seed = seed
        self.tolerance = tolerance
        self.binary_slice = binary_slice
        self.target = target
        self.columns = columns

    def _validate_params(self):
        check_choice("method", self.method, METHODS)
        check_choice("objective", self.objective, OBJECTIVES)
        check_choice("optimizer", self.optimizer, OPTIMIZERS)
        if not self.tolerance > 0:
            raise ConfigurationError(f"tolerance must be positive, got {self.tolerance}")

    def fit(self, X, y=None):
        self._validate_params()
        relation = check_relation(X, self.columns, self.domains)
        deps = check_dependencies(self.dependencies)
        if self.target is not None:
            relation.attribute(self.target)
        pipe = fit_pipeline(relation, deps, self.method, self.objective, self.optimizer,
                            self.seed, self.binary_slice)
        self.relation_ = relation
        self.dependencies_ = deps
        self.network_ = pipe.network
        self.triangulation_ = pipe.triangulation
        self.tree_ = pipe.tree
        self.learned_ = pipe.learned
        self.model_ = propagate(pipe.model, (), self.tolerance)
        self.feature_names_in_ = np.array(relation.names, dtype=object)
        self.n_features_in_ = len(relation.names)
        return self

    def _constraints(self, evidence):
        if evidence is None:
            return []
        if isinstance(evidence, Mapping):
            return hard_evidence({a: _plain(v) for a, v in evidence.items() if not _missing(v)})
        out = list(evidence)
        for q in out:
            if not isinstance(q, MarginalConstraint):
                raise ConfigurationError(f"evidence entries must be constraints, got {q!r}")
        return out

    def query(self, evidence=None, targets=None):
        """Posterior marginals of ``targets`` (default: every attribute)."""
        check_is_fitted(self, "model_")
        if targets is None:
            targets = self.relation_.names
        targets = [(t,) if isinstance(t, str) else tuple(t) for t in targets]
        for t in targets:
            self.model_.route(t)
        post = propagate(self.model_, self._constraints(evidence), self.tolerance)
        return {t: post.marginal(t) for t in targets}

    def _rows(self, X):
        if hasattr(X, "columns") and hasattr(X, "to_numpy"):
            names = [str(c) for c in X.columns]
            return [dict(zip(names, r)) for r in X.to_numpy(dtype=object).tolist()]
        rows = []
        for r in X:
            if isinstance(r, Mapping):
                rows.append(dict(r))
            else:
                r = list(r)
                if len(r) != self.n_features_in_:
                    raise SchemaError(f"expected {self.n_features_in_} values per row, got {len(r)}")
                rows.append(dict(zip(self.relation_.names, r)))
        return rows

    def predict_proba(self, X):
        """``P(target | observed values)`` per row; missing cells are unobserved.

        Columns follow the target's domain order (see ``classes_``).
        """
        check_is_fitted(self, "model_")
        if self.target is None:
            raise ConfigurationError("set `target` to predict")
        out = []
        for row in self._rows(X):
            row.pop(self.target, None)
            post = propagate(self.model_, self._constraints(row), self.tolerance)
            table = post.marginal((self.target,))
            out.append([float(table[(v,)]) for v in self.classes_])
        return np.array(out)

    @property
    def classes_(self):
        check_is_fitted(self, "model_")
        if self.target is None:
            raise AttributeError("no target attribute set")
        return np.array(self.relation_.domain(self.target), dtype=object)

    def predict(self, X):
        proba = self.predict_proba(X)
        return self.classes_[np.argmax(proba, axis=1)]
