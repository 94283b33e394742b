"""Proof-tree explanations for value withdrawals.

Every removal along a branch gets a proof tree: restriction removals are
axioms (facts of the branching choice), propagation removals cite the
already-built trees of their antecedents. A descent pass builds those
per-branch sets; an ascent pass folds branches back together, adding one
merge node per element removed in several sibling branches, whose context
is the union of the branches' contexts. The maximal-context tree at the
root is the explanation of the element's withdrawal.

Judgments are written context ⊢ element, the context being a set of branch
ids, each standing for its branch's restricted environment. Within one
branch every judgment carries that branch's own context: a withdrawal that
holds under a looser restriction also holds under any tighter one, so
re-keying shared-prefix removals per leaf branch is sound and keeps every
rule instance's premises and conclusion in the same context.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional

from .csp import Csp, DomainElement
from .errors import UsageError
from .operators import (
    LocalConsistencyOperator,
    Operator,
    RestrictionOperator,
    RuleKind,
)
from .search import SearchNode, SearchTree

MERGE_ORIGIN = "MERGE"


@dataclass(frozen=True)
class Judgment:
    """context ⊢ element: the element is withdrawn in every branch of the context."""

    context: frozenset[str]
    element: DomainElement


@dataclass(frozen=True)
class ProofTree:
    judgment: Judgment
    kind: RuleKind
    origin: str
    children: tuple["ProofTree", ...] = ()

    def walk(self, node_id: str = "0") -> Iterator[tuple[str, "ProofTree"]]:
        """Preorder traversal yielding stable dotted-path node ids."""
        yield node_id, self
        for i, child in enumerate(self.children):
            yield from child.walk(f"{node_id}.{i}")

    def node(self, node_id: str) -> "ProofTree":
        for nid, t in self.walk():
            if nid == node_id:
                return t
        raise UsageError(f"no node {node_id!r} in this proof tree")

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)

    def height(self) -> int:
        return 1 + max((c.height() for c in self.children), default=0)


def s_down(tree: SearchTree, leaf: SearchNode) -> dict[DomainElement, ProofTree]:
    """Build the proof trees of every removal along the leaf's branch.

    Walks the root-to-leaf path in order: restriction facts become leaf
    trees, each closure removal becomes a node over the trees of its
    antecedents. Exactly one tree per removed element.
    """
    ctx = frozenset({leaf.branch_id})
    built: dict[DomainElement, ProofTree] = {}
    for node in leaf.path():
        for entry in node.restriction_facts:
            built[entry.element] = ProofTree(Judgment(ctx, entry.element), RuleKind.RESTRICTION, entry.rule.origin)
        if node.closure_result is None:
            continue
        for entry in node.closure_result.log:
            rule = entry.rule
            kids = []
            for ant in sorted(rule.antecedents, key=tree.csp.domain.element_key):
                sub = built.get(ant)
                if sub is None:
                    raise RuntimeError(
                        f"removal log corrupt on branch {leaf.branch_id!r}: "
                        f"antecedent {ant} of {entry.element} has no prior tree"
                    )
                kids.append(sub)
            built[entry.element] = ProofTree(Judgment(ctx, entry.element), rule.kind, rule.origin, tuple(kids))
    return built


def s_up(
    tree: SearchTree,
    branch_sets: Mapping[str, Mapping[DomainElement, ProofTree]],
) -> dict[DomainElement, tuple[ProofTree, ...]]:
    """Fold the per-branch sets up to the root, merging across sibling branches.

    At each partition node, elements rooted in two or more child branches
    gain a merge tree whose context is the union of those branches and
    whose children are the per-branch trees (merges never nest). Returns
    the root's collection, per element, in branch order with merges last.
    """

    def ascend(node: SearchNode) -> dict[DomainElement, list[ProofTree]]:
        if node.is_leaf():
            return {el: [t] for el, t in branch_sets[node.branch_id].items()}
        acc: dict[DomainElement, list[ProofTree]] = {}
        for child in node.children:
            for el, ts in ascend(child).items():
                acc.setdefault(el, []).extend(ts)
        for el, ts in acc.items():
            plains = [t for t in ts if t.kind is not RuleKind.LABELING]
            if len(plains) < 2:
                continue
            ctx = frozenset().union(*(t.judgment.context for t in plains))
            if any(t.kind is RuleKind.LABELING and t.judgment.context == ctx for t in ts):
                continue
            ts.append(ProofTree(Judgment(ctx, el), RuleKind.LABELING, MERGE_ORIGIN, tuple(plains)))
        return acc

    return {el: tuple(ts) for el, ts in ascend(tree.root).items()}


@dataclass
class ExplanationStore:
    """Queryable per-branch and merged proof trees for one solved tree."""

    tree: SearchTree
    branch_sets: dict[str, dict[DomainElement, ProofTree]]
    root_sets: dict[DomainElement, tuple[ProofTree, ...]]

    @classmethod
    def build(cls, tree: SearchTree) -> "ExplanationStore":
        branch_sets = {leaf.branch_id: s_down(tree, leaf) for leaf in tree.leaves}
        return cls(tree, branch_sets, s_up(tree, branch_sets))

    def explain(self, element: DomainElement) -> Optional[ProofTree]:
        """The maximal-context proof tree for the element, or None if never removed."""
        trees = self.root_sets.get(element)
        if not trees:
            return None
        return max(trees, key=lambda t: len(t.judgment.context))

    def trees_for(self, element: DomainElement) -> tuple[ProofTree, ...]:
        return self.root_sets.get(element, ())

    def branch_tree(self, branch_id: str, element: DomainElement) -> Optional[ProofTree]:
        return self.branch_sets.get(branch_id, {}).get(element)

    def removed_elements(self) -> list[DomainElement]:
        return sorted(self.root_sets, key=self.tree.csp.domain.element_key)

    def failure_explanation(self, branch_id: str, var: str) -> tuple[ProofTree, ...]:
        """One proof tree per domain value of the emptied variable at a failure leaf."""
        leaf = self.tree.node(branch_id)
        if not leaf.is_leaf():
            raise UsageError(f"branch {branch_id!r} is not a leaf")
        if leaf.env.values(var):
            raise UsageError(f"{var!r} is not empty on branch {branch_id!r}")
        branch = self.branch_sets[branch_id]
        return tuple(branch[DomainElement(var, v)] for v in self.tree.csp.domain.of(var))


def verify_proof_tree(
    pt: ProofTree,
    csp: Csp,
    operators: Mapping[str, Operator],
    *,
    exhaustive_limit: int = 12,
    samples: int = 1000,
    seed: int = 0,
) -> bool:
    """Check that every node instantiates a valid rule.

    Local nodes get the brute-force soundness check — no environment
    disjoint from the antecedents may keep the conclusion alive — done
    exhaustively while the global domain has at most `exhaustive_limit`
    elements and on `samples` random environments above that. Restriction
    nodes must be axioms excluded by their operator; merge nodes must
    union their children's contexts over a shared element.
    """
    domain = csp.domain
    all_elements = tuple(domain.elements())
    rng = random.Random(seed)

    def local_sound(op: LocalConsistencyOperator, h: DomainElement, ants: frozenset[DomainElement]) -> bool:
        rest = [el for el in all_elements if el not in ants]
        index = {el: i for i, el in enumerate(rest)}
        # Support parts touching an antecedent can never be satisfied by a
        # candidate environment; drop them up front.
        masks = []
        for part in op.supports.get(h.value, ()):
            if any(m in ants for m in part):
                continue
            mask = 0
            for m in part:
                bit = index.get(m)
                if bit is None:
                    return False  # part member outside the domain universe
                mask |= 1 << bit
            masks.append(mask)
        if not masks:
            return True
        if len(all_elements) <= exhaustive_limit:
            candidates: Iterator[int] = iter(range(1 << len(rest)))
        else:
            candidates = iter(rng.getrandbits(len(rest)) for _ in range(samples))
        for dmask in candidates:
            if any(mask & ~dmask == 0 for mask in masks):
                return False
        return True

    def node_ok(t: ProofTree) -> bool:
        j = t.judgment
        if t.kind is RuleKind.RESTRICTION:
            op = operators.get(t.origin)
            return (
                isinstance(op, RestrictionOperator)
                and not t.children
                and j.element.var == op.var
                and j.element.value not in op.kept
            )
        if t.kind is RuleKind.LABELING:
            if not t.children:
                return False
            if any(c.kind is RuleKind.LABELING or c.judgment.element != j.element for c in t.children):
                return False
            return frozenset().union(*(c.judgment.context for c in t.children)) == j.context
        op = operators.get(t.origin)
        if not isinstance(op, LocalConsistencyOperator) or j.element.var != op.out_var:
            return False
        if any(c.judgment.context != j.context for c in t.children):
            return False
        ants = frozenset(c.judgment.element for c in t.children)
        return local_sound(op, j.element, ants)

    return all(node_ok(t) for _, t in pt.walk())
