"""Dehn twists, twist families on SL(2,C) representation varieties, and
checks of resolution-length and analysis-lattice height bounds."""

from .errors import (CentralizerError, CertificationError, DegenerateElementError, DomainError,
                     LatticeError, LimitresError, MalformedWordError, ParseError,
                     PreconditionError, RankMismatchError)
from .flows import TwistFamily, eval_family, make_family, verify_flow
from .folding import generates_free_group
from .lattice import AnalysisLattice, LatticeNode, check_bound, height, parse_lattice
from .repvar import Representation, evaluate, is_on_variety, local_dimension, relator_jacobian
from .resolution import certify_resolution, dimension_sequence, load_resolution, verify_resolution
from .sl2c import exp_mat, log_mat, standard_neighborhood
from .splittings import OneEdgedSplitting, check_diagram, elementary_twist, lift
from .words import GroupMap, Presentation, Word, apply_map, compose, fox_derivative

__version__ = "0.1.0"

__all__ = [
    "AnalysisLattice",
    "CentralizerError",
    "CertificationError",
    "DegenerateElementError",
    "DomainError",
    "GroupMap",
    "LatticeError",
    "LatticeNode",
    "LimitresError",
    "MalformedWordError",
    "OneEdgedSplitting",
    "ParseError",
    "PreconditionError",
    "Presentation",
    "RankMismatchError",
    "Representation",
    "TwistFamily",
    "Word",
    "apply_map",
    "certify_resolution",
    "check_bound",
    "check_diagram",
    "compose",
    "dimension_sequence",
    "elementary_twist",
    "eval_family",
    "evaluate",
    "exp_mat",
    "fox_derivative",
    "generates_free_group",
    "height",
    "is_on_variety",
    "lift",
    "load_resolution",
    "local_dimension",
    "log_mat",
    "make_family",
    "parse_lattice",
    "relator_jacobian",
    "standard_neighborhood",
    "verify_flow",
    "verify_resolution",
]
