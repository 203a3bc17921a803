"""Rules with first-class instances: Hilbert and natural-deduction systems,
derivability and admissibility checks, and rule elimination."""
from pathlib import Path

from .aphs import Aphs, Budget, ExplicitRule, Instance, NamedAxiom, NamedRule, SchemeRule, TermSpace
from .ars import Ars, ArsStep, induced_relation, reachable, steps_between, trs_step_expansion
from .derivation import AssumptionLeaf, AxiomLeaf, RuleNode, check_derivation
from .search import Verdict, derives, is_theorem, theorem_set
from .terms import Signature, Symbol, Term, Var, enumerate_terms, parse_scheme, parse_term

CORPUS = Path(__file__).parent / "corpus"

__all__ = [
    "Aphs", "Ars", "ArsStep", "AssumptionLeaf", "AxiomLeaf", "Budget", "CORPUS", "ExplicitRule",
    "Instance", "NamedAxiom", "NamedRule", "RuleNode", "SchemeRule", "Signature", "Symbol", "Term",
    "TermSpace", "Var", "Verdict", "check_derivation", "derives", "enumerate_terms", "induced_relation",
    "is_theorem", "parse_scheme", "parse_term", "reachable", "steps_between", "theorem_set",
    "trs_step_expansion",
]
