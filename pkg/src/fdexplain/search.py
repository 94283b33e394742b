"""Labeling search trees: partitions, nodes, depth-first solving.

Each label variable splits the current environment into disjoint cells, one
restriction operator per cell; once every label variable is pinned, the
branch runs propagation to closure and becomes a leaf. Restrictions are
applied to the environment as it stands when the branching happens, before
any propagation at that node, so every value of the labeled variable gets
its own branch; each leaf then satisfies env = closure(restricted env),
which is what makes the tree complete.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional, Sequence

from .csp import Csp, Environment, TupleAssignment, is_solution
from .errors import UsageError
from .operators import (
    LocalConsistencyOperator,
    Operator,
    RestrictionOperator,
    RuleInstance,
    RuleKind,
    local_operators,
    make_restriction,
)
from .propagation import ClosureResult, LogEntry, closure, closure_bruteforce

ROOT_ID = "root"
ROOT_ARRIVAL = "ROOT"


class Strategy(Enum):
    ENUMERATE = "enumerate"
    SPLIT = "split"


class LeafStatus(Enum):
    SOLUTION = "SOLUTION"
    FAILURE = "FAILURE"
    EXHAUSTED = "EXHAUSTED"


@dataclass(frozen=True)
class Partition:
    """Disjoint non-empty cells exactly covering the variable's current values."""

    var: str
    cells: tuple[tuple[int, ...], ...]


def partition(env: Environment, var: str, strategy: Strategy) -> Partition:
    """ENUMERATE gives singleton cells; SPLIT halves (lower half takes the extra)."""
    vals = sorted(env.values(var))
    if not vals:
        raise UsageError(f"cannot partition {var!r}: its environment is empty")
    if strategy is Strategy.ENUMERATE or len(vals) == 1:
        cells = tuple((v,) for v in vals)
    else:
        cut = math.ceil(len(vals) / 2)
        cells = (tuple(vals[:cut]), tuple(vals[cut:]))
    return Partition(var, cells)


@dataclass
class SearchNode:
    """One decision point of the tree: (env, restricted env, arriving op, depth).

    Interior nodes branch on a partition; leaves carry the closure that was
    run after the branch's last restriction, plus the leaf status.
    """

    branch_id: str
    depth: int
    arriving: str
    restricted_env: Environment
    entry_env: Environment
    env: Environment
    parent: Optional["SearchNode"] = field(default=None, repr=False)
    status: Optional[LeafStatus] = None
    part: Optional[Partition] = None
    restriction_facts: list[LogEntry] = field(default_factory=list)
    closure_result: Optional[ClosureResult] = None
    children: list["SearchNode"] = field(default_factory=list)
    leaf_ordinal: Optional[int] = None
    solution: Optional[TupleAssignment] = None

    def is_leaf(self) -> bool:
        return self.status is not None

    def path(self) -> list["SearchNode"]:
        nodes = []
        node: Optional[SearchNode] = self
        while node is not None:
            nodes.append(node)
            node = node.parent
        return nodes[::-1]


@dataclass
class SearchTree:
    csp: Csp
    label_vars: tuple[str, ...]
    strategies: dict[str, Strategy]
    local_ops: list[LocalConsistencyOperator]
    root: SearchNode
    nodes: dict[str, SearchNode] = field(default_factory=dict)
    leaves: list[SearchNode] = field(default_factory=list)
    restriction_ops: dict[str, RestrictionOperator] = field(default_factory=dict)

    def strategy_for(self, var: str) -> Strategy:
        return self.strategies.get(var, Strategy.ENUMERATE)

    def node(self, branch_id: str) -> SearchNode:
        try:
            return self.nodes[branch_id]
        except KeyError:
            raise UsageError(f"unknown branch {branch_id!r}") from None

    def operators_by_id(self) -> dict[str, Operator]:
        ops: dict[str, Operator] = {op.id: op for op in self.local_ops}
        ops.update(self.restriction_ops)
        return ops


def _child_branch_id(parent_id: str, op_id: str) -> str:
    return op_id if parent_id == ROOT_ID else f"{parent_id}/{op_id}"


def solve(
    csp: Csp,
    label_vars: Sequence[str],
    strategy: Strategy | Mapping[str, Strategy] = Strategy.ENUMERATE,
) -> SearchTree:
    """Build the complete search tree for the given labeling order.

    `strategy` is either one Strategy for every label variable or a
    per-variable mapping (unlisted variables enumerate).
    """
    unknown = [v for v in label_vars if v not in csp.variables]
    if unknown:
        raise UsageError(f"cannot label undeclared variables {unknown}")
    if isinstance(strategy, Strategy):
        strategies = {v: strategy for v in label_vars}
    else:
        strategies = dict(strategy)
    full = csp.full_env()
    root = SearchNode(ROOT_ID, 0, ROOT_ARRIVAL, full, full, full)
    tree = SearchTree(csp, tuple(label_vars), strategies, local_operators(csp), root)
    tree.nodes[ROOT_ID] = root
    _expand(tree, root)
    return tree


def _expand(tree: SearchTree, node: SearchNode) -> None:
    d = node.entry_env
    var = next((v for v in tree.label_vars if len(d.values(v)) > 1), None)

    if var is None:
        result = closure(d, tree.local_ops)
        node.closure_result = result
        node.env = result.env
        if result.env.empty_vars():
            node.status = LeafStatus.FAILURE
        elif result.env.all_singleton():
            t = TupleAssignment.of({v: min(result.env.values(v)) for v in tree.csp.variables})
            if is_solution(tree.csp, t):
                node.status = LeafStatus.SOLUTION
                node.solution = t
            else:
                node.status = LeafStatus.EXHAUSTED
        else:
            node.status = LeafStatus.EXHAUSTED
        node.leaf_ordinal = len(tree.leaves)
        tree.leaves.append(node)
        return

    part = partition(d, var, tree.strategy_for(var))
    node.part = part
    node.env = d
    for cell in part.cells:
        rop = make_restriction(tree.csp.domain, var, cell)
        rop = tree.restriction_ops.setdefault(rop.id, rop)
        child_entry = rop.reduce(d)
        child_restricted = rop.reduce(node.restricted_env)
        child = SearchNode(
            branch_id=_child_branch_id(node.branch_id, rop.id),
            depth=node.depth + 1,
            arriving=rop.id,
            restricted_env=child_restricted,
            entry_env=child_entry,
            env=child_entry,
            parent=node,
        )
        dropped = [el for el in d.elements() if el.var == var and el.value not in rop.kept]
        child.restriction_facts = [
            LogEntry(i, el, RuleInstance(el, frozenset(), rop.id, RuleKind.RESTRICTION))
            for i, el in enumerate(dropped)
        ]
        node.children.append(child)
        tree.nodes[child.branch_id] = child
        _expand(tree, child)


def solutions(tree: SearchTree) -> frozenset[TupleAssignment]:
    """The tuples read off the tree's SOLUTION leaves."""
    return frozenset(leaf.solution for leaf in tree.leaves if leaf.status is LeafStatus.SOLUTION)


def is_complete(tree: SearchTree) -> bool:
    """Every leaf environment is the closure of its restricted environment (oracle-checked)."""
    return all(
        leaf.env == closure_bruteforce(leaf.restricted_env, tree.local_ops)
        for leaf in tree.leaves
    )
