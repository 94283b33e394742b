"""Oracle-guided declarative debugging over an explanation tree.

The symptom is a withdrawal the user expected not to happen (a missing
solution). Starting from the explanation's root, the session asks for a
CORRECT/INCORRECT verdict per judgment and descends until it finds an
incorrect node all of whose premises are correct — the minimal symptom.
The blamed constraint is the one whose operator fired that node's rule;
reaching a restriction fact or a merge blames the labeling choice instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Mapping, Optional

from .csp import Csp, Environment
from .errors import UsageError
from .explanations import Judgment, ProofTree, verify_proof_tree
from .operators import LocalConsistencyOperator, Operator, RuleKind, local_operators
from .propagation import closure_bruteforce
from .search import SearchTree


class Verdict(Enum):
    CORRECT = "CORRECT"
    INCORRECT = "INCORRECT"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class Blame:
    """The minimal symptom and what it incriminates."""

    node_id: str
    kind: RuleKind
    origin: str
    constraint_id: Optional[str]


@dataclass
class DiagnosisSession:
    tree: ProofTree
    operators: Mapping[str, Operator]
    nodes: dict[str, ProofTree] = field(default_factory=dict)
    children_ids: dict[str, list[str]] = field(default_factory=dict)
    parent_ids: dict[str, Optional[str]] = field(default_factory=dict)
    preorder: list[str] = field(default_factory=list)
    verdicts: dict[str, Verdict] = field(default_factory=dict)
    transcript: list[tuple[str, Verdict]] = field(default_factory=list)
    cursor: Optional[str] = None
    concluded: bool = False
    blame: Optional[Blame] = None

    def judgment(self, node_id: str) -> Judgment:
        return self.nodes[node_id].judgment


def start_session(pt: ProofTree, csp: Csp, operators: Mapping[str, Operator]) -> DiagnosisSession:
    """Open a session on a verified proof tree, cursor at the root."""
    if not verify_proof_tree(pt, csp, operators):
        raise UsageError("refusing to diagnose an unverified proof tree")
    session = DiagnosisSession(pt, operators)
    for node_id, node in pt.walk():
        session.nodes[node_id] = node
        session.verdicts[node_id] = Verdict.UNKNOWN
        session.children_ids[node_id] = [f"{node_id}.{i}" for i in range(len(node.children))]
        session.preorder.append(node_id)
        for child_id in session.children_ids[node_id]:
            session.parent_ids[child_id] = node_id
    session.parent_ids["0"] = None
    session.cursor = "0"
    return session


def answer(session: DiagnosisSession, node_id: str, verdict: Verdict) -> DiagnosisSession:
    """Record one verdict and advance the cursor (or conclude with a blame).

    A node may be answered when it is the cursor, or out of turn when its
    parent is already known INCORRECT (the query would be asked eventually).
    """
    if session.concluded:
        raise UsageError("the session is already concluded")
    if verdict not in (Verdict.CORRECT, Verdict.INCORRECT):
        raise UsageError("verdicts are CORRECT or INCORRECT")
    if node_id not in session.nodes:
        raise UsageError(f"unknown node {node_id!r}")
    if session.verdicts[node_id] is not Verdict.UNKNOWN:
        raise UsageError(f"node {node_id!r} was already answered")
    parent = session.parent_ids.get(node_id)
    if node_id != session.cursor and not (parent is not None and session.verdicts[parent] is Verdict.INCORRECT):
        raise UsageError(f"node {node_id!r} is not a legal query target yet")
    session.verdicts[node_id] = verdict
    session.transcript.append((node_id, verdict))
    _advance(session)
    return session


def _advance(session: DiagnosisSession) -> None:
    root = session.verdicts["0"]
    if root is Verdict.UNKNOWN:
        session.cursor = "0"
        return
    if root is Verdict.CORRECT:
        session.concluded = True
        session.cursor = None
        session.blame = None
        return
    # The symptom is confirmed. Conclude on the first incorrect node whose
    # premises are all judged correct; otherwise query the first unknown
    # child of the shallowest incorrect node.
    for node_id in session.preorder:
        if session.verdicts[node_id] is not Verdict.INCORRECT:
            continue
        kids = session.children_ids[node_id]
        if all(session.verdicts[k] is Verdict.CORRECT for k in kids):
            session.concluded = True
            session.cursor = None
            session.blame = _blame_for(session, node_id)
            return
    open_nodes = [
        node_id
        for node_id in session.preorder
        if session.verdicts[node_id] is Verdict.INCORRECT
        and any(session.verdicts[k] is Verdict.UNKNOWN for k in session.children_ids[node_id])
    ]
    if not open_nodes:
        raise RuntimeError("diagnosis cursor rule reached an impossible state")
    shallowest = min(open_nodes, key=lambda nid: (nid.count("."), session.preorder.index(nid)))
    session.cursor = next(
        k for k in session.children_ids[shallowest] if session.verdicts[k] is Verdict.UNKNOWN
    )


def _blame_for(session: DiagnosisSession, node_id: str) -> Blame:
    node = session.nodes[node_id]
    constraint_id = None
    if node.kind is RuleKind.LOCAL:
        op = session.operators.get(node.origin)
        if isinstance(op, LocalConsistencyOperator):
            constraint_id = op.constraint.id
    return Blame(node_id, node.kind, node.origin, constraint_id)


def diagnose(
    pt: ProofTree,
    oracle: Callable[[Judgment], Verdict],
    csp: Csp,
    operators: Mapping[str, Operator],
) -> DiagnosisSession:
    """Run a whole session answering every cursor query through the oracle."""
    session = start_session(pt, csp, operators)
    while not session.concluded:
        node_id = session.cursor
        assert node_id is not None
        answer(session, node_id, oracle(session.judgment(node_id)))
    return session


def make_intended_oracle(intended: Csp, tree: SearchTree) -> Callable[[Judgment], Verdict]:
    """Judge against the CSP the user meant to write.

    A judgment is CORRECT when the element is withdrawn under the intended
    constraints in every branch of its context, computed with the oracle
    closure per branch.
    """
    if intended.domain != tree.csp.domain:
        raise UsageError("the intended CSP must share the global domain")
    ops = local_operators(intended)
    cache: dict[str, Environment] = {}

    def closure_of(branch_id: str) -> Environment:
        if branch_id not in cache:
            cache[branch_id] = closure_bruteforce(tree.node(branch_id).restricted_env, ops)
        return cache[branch_id]

    def oracle(j: Judgment) -> Verdict:
        withdrawn_everywhere = all(j.element not in closure_of(b) for b in j.context)
        return Verdict.CORRECT if withdrawn_everywhere else Verdict.INCORRECT

    return oracle


def transcript_payload(session: DiagnosisSession) -> dict:
    """Canonical transcript of a concluded session, as plain JSON-ready data."""
    element = session.tree.judgment.element
    if not session.concluded:
        raise UsageError("only concluded sessions have a transcript")
    if session.blame is None:
        outcome: dict = {"kind": "no_blame"}
    elif session.blame.kind is RuleKind.LOCAL:
        outcome = {
            "kind": "constraint",
            "constraint": session.blame.constraint_id,
            "node": session.blame.node_id,
            "origin": session.blame.origin,
        }
    elif session.blame.kind is RuleKind.RESTRICTION:
        outcome = {"kind": "restriction", "choice": session.blame.origin, "node": session.blame.node_id}
    else:
        outcome = {"kind": "labeling", "node": session.blame.node_id}
    return {
        "answers": [{"node": nid, "verdict": v.value} for nid, v in session.transcript],
        "element": {"value": element.value, "var": element.var},
        "outcome": outcome,
    }
