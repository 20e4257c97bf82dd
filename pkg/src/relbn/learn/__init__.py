"""Learning clique priors and local characteristics."""
from ..encoding import decode_index, encode_index
from .sop import SopFormula, parse_sop, sop_minimize
from .local import dirichlet_lc, dirichlet_row, frequency_lc, frequency_prior
from .nnor import KMap, NNORReport, nnor_learn, score_assignments
from .learners import METHODS, LearnedTable, learn_table

__all__ = [
    "encode_index",
    "decode_index",
    "SopFormula",
    "parse_sop",
    "sop_minimize",
    "frequency_prior",
    "dirichlet_row",
    "dirichlet_lc",
    "frequency_lc",
    "KMap",
    "NNORReport",
    "nnor_learn",
    "score_assignments",
    "METHODS",
    "LearnedTable",
    "learn_table",
]
