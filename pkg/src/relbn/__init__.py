"""Belief networks built from relational sample data.

Dependencies found in a relation drive a lossless decomposition, a belief
network and a junction tree; clique priors are learned from the data and
updated with Jeffrey's rule.
"""
from .exceptions import *  # noqa: F401,F403
from .relation import (
    Attribute,
    FrequencyTable,
    Relation,
    cond_frequency,
    fd_holds,
    frequency,
    md_holds,
    natural_join,
    pd_holds,
    pd_holds_wrt,
    project,
    select,
)
from .dependencies import (
    Decomposition,
    Dependency,
    attribute_closure,
    decompose_4nf,
    find_key,
    is_key,
    preserves_fds,
    verify_lossless_join,
)
from .network import (
    BeliefNetwork,
    ConditionalTable,
    MarginalConstraint,
    NeighborhoodGraph,
    build_bn,
    conditional_table,
    extract_ccs,
    moral_graph,
    neighborhood_graph,
)
from .decompose import (
    AnnealSchedule,
    JunctionTree,
    Triangulation,
    anneal_decompose,
    build_junction_tree,
    graham_is_acyclic,
    greedy_decompose,
    is_chordal,
    total_states,
    triangulate,
)
from .potential import CliquePotential
from .inference import (
    CalibratedModel,
    JeffreyConstraint,
    belief_extract,
    frequency_model,
    hard_evidence,
    jeffrey_update,
    oracle_query,
    product_model,
    propagate,
    query,
)
from .pipeline import Pipeline, fit_pipeline
from .estimator import RelationalBeliefNetwork

__version__ = "0.1.0"
