"""End-to-end assembly: dependencies -> network -> junction tree -> calibrated model."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .decompose import (
    AnnealSchedule,
    JunctionTree,
    Triangulation,
    anneal_decompose,
    build_junction_tree,
    greedy_decompose,
)
from .dependencies import Dependency
from .exceptions import ConfigurationError
from .inference import CalibratedModel, frequency_model, product_model
from .learn import METHODS, LearnedTable, learn_table
from .network import BeliefNetwork, build_bn, conditional_table, moral_graph
from .relation import Relation

OBJECTIVES = ("states", "fill")
OPTIMIZERS = ("greedy", "anneal")


@dataclass
class Pipeline:
    network: BeliefNetwork
    triangulation: Triangulation
    tree: JunctionTree
    model: CalibratedModel
    learned: dict[str, LearnedTable]


def check_choice(name: str, value: str, allowed: Sequence[str]) -> str:
    if value not in allowed:
        raise ConfigurationError(f"{name} must be one of {tuple(allowed)}, got {value!r}")
    return value


def decompose_network(bn: BeliefNetwork, sizes, objective="states", optimizer="greedy",
                      seed=0, schedule: AnnealSchedule | None = None) -> Triangulation:
    check_choice("objective", objective, OBJECTIVES)
    check_choice("optimizer", optimizer, OPTIMIZERS)
    graph = moral_graph(bn)
    if optimizer == "greedy":
        return greedy_decompose(graph, sizes, objective)
    return anneal_decompose(graph, sizes, seed=seed, schedule=schedule, objective=objective)


def learn_network(relation: Relation, bn: BeliefNetwork, method: str,
                  binary_slice: bool = False) -> dict[str, LearnedTable]:
    """One learned table per node, conditioned on all of the node's parents."""
    check_choice("method", method, METHODS)
    return {
        node: learn_table(conditional_table(relation, node, bn.parents(node)), method, binary_slice)
        for node in bn.nodes
    }


def fit_pipeline(relation: Relation, deps: Iterable[Dependency], method="frequency",
                 objective="states", optimizer="greedy", seed=0, binary_slice=False,
                 schedule: AnnealSchedule | None = None) -> Pipeline:
    """Build and calibrate a model of ``relation`` structured by ``deps``.

    ``frequency`` reads clique priors straight from the data.  ``dirichlet``
    and ``nnor`` learn a complete table for every node and calibrate the
    product of those tables instead.
    """
    check_choice("method", method, METHODS)
    bn = build_bn(deps, relation.names)
    sizes = {a: len(relation.domain(a)) for a in relation.names}
    tri = decompose_network(bn, sizes, objective, optimizer, seed, schedule)
    tree = build_junction_tree(tri.cliques, relation.names)
    if method == "frequency":
        return Pipeline(bn, tri, tree, frequency_model(relation, tree), {})
    learned = learn_network(relation, bn, method, binary_slice)
    model = product_model(tree, [lt.table for lt in learned.values()], relation.domains)
    return Pipeline(bn, tri, tree, model, learned)
