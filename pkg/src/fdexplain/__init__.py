"""Finite-domain constraint solving with proof-tree withdrawal explanations."""

from .csp import (
    ConstraintSpec,
    Csp,
    DomainElement,
    Environment,
    GlobalDomain,
    Kind,
    TupleAssignment,
    is_solution,
    satisfies,
    semantics,
    solutions_bruteforce,
)
from .diagnosis import (
    Blame,
    DiagnosisSession,
    Verdict,
    answer,
    diagnose,
    make_intended_oracle,
    start_session,
)
from .errors import ModelSyntaxError, UsageError
from .explanations import (
    ExplanationStore,
    Judgment,
    ProofTree,
    s_down,
    s_up,
    verify_proof_tree,
)
from .model_io import Model, parse_model, print_model
from .operators import (
    LocalConsistencyOperator,
    OperatorType,
    RestrictionOperator,
    RuleInstance,
    RuleKind,
    arc_operators_for,
    local_operators,
    make_restriction,
    restriction_rules,
)
from .propagation import (
    ClosureResult,
    RemovalLog,
    chaotic_iterate,
    closure,
    closure_bruteforce,
)
from .retraction import SolverState, retract, verify_retraction
from .search import (
    LeafStatus,
    Partition,
    SearchNode,
    SearchTree,
    Strategy,
    is_complete,
    partition,
    solutions,
    solve,
)

__all__ = [name for name in dir() if not name.startswith("_")]
