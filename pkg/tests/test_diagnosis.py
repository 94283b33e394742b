import random

import pytest

from fdexplain.corpus import mutate_constraint, random_csp
from fdexplain.csp import ConstraintSpec, Csp, DomainElement, Kind
from fdexplain.diagnosis import (
    Blame,
    Verdict,
    answer,
    diagnose,
    make_intended_oracle,
    start_session,
    transcript_payload,
)
from fdexplain.errors import UsageError
from fdexplain.explanations import ExplanationStore
from fdexplain.operators import RuleKind
from fdexplain.search import solve


def el(var, value):
    return DomainElement(var, value)


@pytest.fixture(scope="module")
def mp2(conference_tree, conference_store):
    return conference_store.explain(el("MP", 2)), conference_tree


@pytest.fixture(scope="module")
def intended_ge(conference):
    """The conference problem the user meant: MP >= PM instead of MP > PM."""
    constraints = tuple(
        ConstraintSpec("c4", Kind.GE, c.scope, c.offset) if c.id == "c4" else c
        for c in conference.csp.constraints
    )
    return Csp(conference.csp.variables, conference.csp.domain, constraints)


def test_start_session(mp2):
    pt, tree = mp2
    session = start_session(pt, tree.csp, tree.operators_by_id())
    assert len(session.nodes) == 9
    assert session.cursor == "0"
    assert all(v is Verdict.UNKNOWN for v in session.verdicts.values())


def test_start_session_single_fact(conference_tree, conference_store):
    fact = conference_store.branch_tree("PM=1", el("PM", 2))
    session = start_session(fact, conference_tree.csp, conference_tree.operators_by_id())
    assert len(session.nodes) == 1


def test_start_session_rejects_unverified(mp2):
    from fdexplain.explanations import ProofTree

    pt, tree = mp2
    broken = ProofTree(pt.judgment, pt.kind, pt.origin, pt.children[:1])
    with pytest.raises(UsageError):
        start_session(broken, tree.csp, tree.operators_by_id())


def test_manual_session_blames_mp_gt_pm(mp2):
    pt, tree = mp2
    session = start_session(pt, tree.csp, tree.operators_by_id())
    answer(session, "0", Verdict.INCORRECT)
    assert session.cursor == "0.0"
    # Out-of-turn answer on another child of the incorrect root is legal.
    answer(session, "0.1", Verdict.INCORRECT)
    answer(session, "0.1.0", Verdict.CORRECT)
    assert session.concluded
    assert session.blame == Blame("0.1", RuleKind.LOCAL, "c4:MP", "c4")


def test_root_correct_concludes_without_blame(mp2):
    pt, tree = mp2
    session = start_session(pt, tree.csp, tree.operators_by_id())
    answer(session, "0", Verdict.CORRECT)
    assert session.concluded and session.blame is None


def test_descent_to_restriction_fact(mp2):
    pt, tree = mp2
    session = start_session(pt, tree.csp, tree.operators_by_id())
    for node_id, verdict in [
        ("0", Verdict.INCORRECT),
        ("0.0", Verdict.INCORRECT),
        ("0.1", Verdict.CORRECT),
        ("0.2", Verdict.CORRECT),
        ("0.0.0", Verdict.INCORRECT),
        ("0.0.0.0", Verdict.INCORRECT),
    ]:
        assert session.cursor == node_id
        answer(session, node_id, verdict)
    assert session.concluded
    assert session.blame.kind is RuleKind.RESTRICTION
    assert session.blame.origin == "PM=1"


def test_merge_with_correct_children_blames_labeling(mp2):
    pt, tree = mp2
    session = start_session(pt, tree.csp, tree.operators_by_id())
    for node_id, verdict in [
        ("0", Verdict.INCORRECT),
        ("0.0", Verdict.CORRECT),
        ("0.1", Verdict.CORRECT),
        ("0.2", Verdict.CORRECT),
    ]:
        answer(session, node_id, verdict)
    assert session.concluded
    assert session.blame.kind is RuleKind.LABELING
    assert session.blame.constraint_id is None
    assert transcript_payload(session)["outcome"] == {"kind": "labeling", "node": "0"}


def test_reanswer_rejected(mp2):
    pt, tree = mp2
    session = start_session(pt, tree.csp, tree.operators_by_id())
    answer(session, "0", Verdict.INCORRECT)
    with pytest.raises(UsageError):
        answer(session, "0", Verdict.CORRECT)


def test_out_of_turn_without_incorrect_parent_rejected(mp2):
    pt, tree = mp2
    session = start_session(pt, tree.csp, tree.operators_by_id())
    with pytest.raises(UsageError):
        answer(session, "0.1", Verdict.CORRECT)


def test_diagnose_with_intended_oracle(mp2, intended_ge):
    pt, tree = mp2
    oracle = make_intended_oracle(intended_ge, tree)
    session = diagnose(pt, oracle, tree.csp, tree.operators_by_id())
    assert session.blame is not None
    assert session.blame.constraint_id == "c4"
    assert [nid for nid, _ in session.transcript] == ["0", "0.0", "0.1", "0.2", "0.1.0"]
    payload = transcript_payload(session)
    assert payload["outcome"] == {
        "kind": "constraint",
        "constraint": "c4",
        "node": "0.1",
        "origin": "c4:MP",
    }


def test_diagnose_everything_correct_oracle(mp2):
    pt, tree = mp2
    session = diagnose(pt, lambda j: Verdict.CORRECT, tree.csp, tree.operators_by_id())
    assert session.blame is None
    assert len(session.transcript) == 1


def test_intended_equals_actual_gives_no_blame(mp2, conference):
    pt, tree = mp2
    oracle = make_intended_oracle(conference.csp, tree)
    session = diagnose(pt, oracle, tree.csp, tree.operators_by_id())
    assert session.blame is None


def test_query_budget_and_descent_soundness(mp2, intended_ge):
    pt, tree = mp2
    oracle = make_intended_oracle(intended_ge, tree)
    session = diagnose(pt, oracle, tree.csp, tree.operators_by_id())
    assert len(session.transcript) <= len(session.nodes)
    assert len({nid for nid, _ in session.transcript}) == len(session.transcript)
    blame = session.blame
    assert session.verdicts[blame.node_id] is Verdict.INCORRECT
    for child_id in session.children_ids[blame.node_id]:
        assert session.verdicts[child_id] is Verdict.CORRECT


def test_generated_single_mutation_bugs_are_blamed():
    rng = random.Random(20260810)
    qualifying = 0
    attempts = 0
    while qualifying < 10 and attempts < 400:
        attempts += 1
        intended = random_csp(rng, max_vars=3, max_values=3, max_constraints=4)
        mutated = mutate_constraint(rng, intended)
        if mutated is None:
            continue
        actual, bug_id = mutated
        tree = solve(actual, actual.variables)
        store = ExplanationStore.build(tree)
        oracle = make_intended_oracle(intended, tree)
        ops = tree.operators_by_id()
        for element in store.removed_elements():
            pt = store.explain(element)
            if oracle(pt.judgment) is Verdict.INCORRECT:
                bug_ops = {f"{bug_id}:{v}" for v in actual.constraint(bug_id).scope}
                if not any(node.origin in bug_ops for _, node in pt.walk()):
                    continue
                session = diagnose(pt, oracle, actual, ops)
                assert session.blame is not None, element
                assert session.blame.constraint_id == bug_id, element
                qualifying += 1
                break
    assert qualifying >= 10
