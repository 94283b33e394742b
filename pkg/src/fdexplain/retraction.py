"""Explanation-based constraint retraction.

Removing a constraint from a propagated state does not restart from
scratch: the removal log tells us exactly which withdrawals depend on the
retracted constraint's operators (directly or through their antecedents).
Those elements are reinserted, the constraint's operators dropped, the
operators that might react to the regained values woken, and propagation
resumed. verify_retraction checks the result against a from-scratch oracle
closure without the constraint.
"""

from __future__ import annotations

from dataclasses import dataclass

from .csp import ConstraintSpec, Csp, DomainElement, Environment
from .errors import UsageError
from .operators import LocalConsistencyOperator, local_operators
from .propagation import LogEntry, RemovalLog, closure, closure_bruteforce
from .search import SearchTree


@dataclass
class SolverState:
    """A propagated snapshot of one branch: env is the closure of
    restricted_env under the active local operators."""

    csp: Csp
    restricted_env: Environment
    env: Environment
    log: RemovalLog
    active_ops: dict[str, LocalConsistencyOperator]

    @classmethod
    def from_root(cls, csp: Csp) -> "SolverState":
        ops = local_operators(csp)
        result = closure(csp.full_env(), ops)
        return cls(csp, csp.full_env(), result.env, result.log, {op.id: op for op in ops})

    @classmethod
    def from_branch(cls, tree: SearchTree, branch_id: str) -> "SolverState":
        """Snapshot a leaf branch, folding its restriction facts into the log."""
        leaf = tree.node(branch_id)
        if not leaf.is_leaf():
            raise UsageError(f"branch {branch_id!r} is not a leaf")
        log = RemovalLog()
        step = 0
        for node in leaf.path():
            for entry in node.restriction_facts:
                log.append(LogEntry(step, entry.element, entry.rule))
                step += 1
            if node.closure_result is not None:
                for entry in node.closure_result.log:
                    log.append(LogEntry(step, entry.element, entry.rule))
                    step += 1
        return cls(tree.csp, leaf.restricted_env, leaf.env, log, {op.id: op for op in tree.local_ops})


def _resolve(state: SolverState, c: ConstraintSpec | str) -> ConstraintSpec:
    cid = c if isinstance(c, str) else c.id
    return state.csp.constraint(cid)


def _operator_ids(c: ConstraintSpec) -> set[str]:
    return {f"{c.id}:{y}" for y in c.scope}


def retract(state: SolverState, c: ConstraintSpec | str) -> SolverState:
    """Undo a constraint: reinsert everything its operators justified, then re-propagate."""
    spec = _resolve(state, c)
    gone = _operator_ids(spec)

    # Forward pass over the chronological log: a removal depends on the
    # retracted constraint if its own rule fired from one of its operators
    # or if any antecedent was already marked.
    reinserted: set[DomainElement] = set()
    surviving: list[LogEntry] = []
    for entry in state.log:
        rule = entry.rule
        if rule.origin in gone or any(a in reinserted for a in rule.antecedents):
            reinserted.add(entry.element)
        else:
            surviving.append(entry)

    env = state.env.with_elements(reinserted)
    active = {oid: op for oid, op in state.active_ops.items() if oid not in gone}

    touched = {el.var for el in reinserted}
    wake = [op for op in active.values() if op.out_var in touched or op.w_in & touched]
    resumed = closure(env, list(active.values()), seed=wake)

    log = RemovalLog(list(surviving))
    base = (surviving[-1].step + 1) if surviving else 0
    for entry in resumed.log:
        log.append(LogEntry(base + entry.step, entry.element, entry.rule))

    return SolverState(state.csp, state.restricted_env, resumed.env, log, active)


def verify_retraction(state: SolverState, c: ConstraintSpec | str) -> bool:
    """Retraction must land exactly on the from-scratch closure without the constraint."""
    spec = _resolve(state, c)
    gone = _operator_ids(spec)
    remaining = [op for oid, op in state.active_ops.items() if oid not in gone]
    expected = closure_bruteforce(state.restricted_env, remaining)
    actual = retract(state, spec).env
    return actual.subset_of(expected) and expected.subset_of(actual)
