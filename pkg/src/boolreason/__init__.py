"""Explain the decisions of Boolean classifiers.

Compile a classifier (or load one in circuit form), then ask why it decided
the way it did on a concrete instance: sufficient reasons, the complete
reason circuit, necessary properties, because / even-if counterfactuals,
and bias checks against a set of protected features.
"""

from .circuit import DecisionDnnf, NnfCircuit
from .dnnf import DnnfInvalidError, dump_nnf, parse_nnf, parse_varmap
from .errors import BoolreasonError, InputError, PreconditionError
from .formula import (
    FeatureSpace,
    Instance,
    Literal,
    Term,
    Variable,
    formula_to_text,
    parse_formula,
    parse_instance,
    parse_term,
)
from .kernels import backend
from .obdd import Obdd, compile_formula, dump_obdd, parse_obdd, to_decision_dnnf
from .queries import (
    BiasVerdict,
    SufficientReasonSet,
    bias_verdict,
    bias_witness_pair,
    classifier_bias_witness,
    decision_is_biased,
    holds_because,
    necessary_property,
    necessary_reason,
    sticks_even_if_because,
    sufficient_reasons,
)
from .reason import (
    Classifier,
    DecisionCase,
    NegationUnavailable,
    ReasonCircuit,
    build_reason,
    dump_reason,
    parse_reason,
)

__version__ = "0.1.0"

__all__ = [
    "BiasVerdict",
    "BoolreasonError",
    "Classifier",
    "DecisionCase",
    "DecisionDnnf",
    "DnnfInvalidError",
    "FeatureSpace",
    "InputError",
    "Instance",
    "Literal",
    "NegationUnavailable",
    "NnfCircuit",
    "Obdd",
    "PreconditionError",
    "ReasonCircuit",
    "SufficientReasonSet",
    "Term",
    "Variable",
    "__version__",
    "backend",
    "bias_verdict",
    "bias_witness_pair",
    "build_reason",
    "classifier_bias_witness",
    "compile_formula",
    "decision_is_biased",
    "dump_nnf",
    "dump_obdd",
    "dump_reason",
    "formula_to_text",
    "holds_because",
    "necessary_property",
    "necessary_reason",
    "parse_formula",
    "parse_instance",
    "parse_nnf",
    "parse_obdd",
    "parse_reason",
    "parse_term",
    "parse_varmap",
    "sticks_even_if_because",
    "sufficient_reasons",
    "to_decision_dnnf",
]
