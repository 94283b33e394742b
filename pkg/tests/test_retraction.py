import pytest
from hypothesis import given, settings

from fdexplain.csp import ConstraintSpec, Csp, DomainElement, GlobalDomain, Kind
from fdexplain.errors import UsageError
from fdexplain.propagation import closure, closure_bruteforce
from fdexplain.retraction import SolverState, retract, verify_retraction
from fdexplain.search import solve

from .strategies import csps


@pytest.fixture()
def chain_csp():
    # X < Y together with a unary table keeping Y in {1,2} ("Y < 3").
    dom = GlobalDomain({"X": (1, 2, 3), "Y": (1, 2, 3)})
    return Csp(
        ("X", "Y"),
        dom,
        (
            ConstraintSpec("c1", Kind.LT, ("X", "Y")),
            ConstraintSpec("c2", Kind.TABLE, ("Y",), tuples=((1,), (2,))),
        ),
    )


def test_worked_example_reintroduces_exactly_two_elements(chain_csp):
    state = SolverState.from_root(chain_csp)
    assert state.env.as_dict() == {"X": frozenset({1}), "Y": frozenset({2})}
    repaired = retract(state, "c2")
    assert repaired.env.as_dict() == {"X": frozenset({1, 2}), "Y": frozenset({2, 3})}
    regained = set(repaired.env.elements()) - set(state.env.elements())
    assert regained == {DomainElement("X", 2), DomainElement("Y", 3)}
    assert verify_retraction(state, "c2")


def test_retract_constraint_that_removed_nothing(conference):
    state = SolverState.from_root(conference.csp)
    repaired = retract(state, "c5")  # AM != PM prunes nothing at the root
    assert repaired.env == state.env
    assert set(repaired.active_ops) == set(state.active_ops) - {"c5:AM", "c5:PM"}


def test_retract_every_conference_constraint(conference):
    state = SolverState.from_root(conference.csp)
    for c in conference.csp.constraints:
        assert verify_retraction(state, c.id)


def test_retract_unknown_constraint(conference):
    state = SolverState.from_root(conference.csp)
    with pytest.raises(UsageError):
        retract(state, "c99")


def test_skipping_wakeup_is_wrong(chain_csp):
    """A retraction that reinserts but never re-propagates keeps stale prunings."""
    state = SolverState.from_root(chain_csp)
    gone = {"c2:Y"}
    reinserted = set()
    for entry in state.log:
        if entry.rule.origin in gone or any(a in reinserted for a in entry.rule.antecedents):
            reinserted.add(entry.element)
    lazy_env = state.env.with_elements(reinserted)
    remaining = [op for oid, op in state.active_ops.items() if oid not in gone]
    expected = closure_bruteforce(state.restricted_env, remaining)
    assert lazy_env == expected  # reinsertion alone happens to land on the closure here

    # Dropping the dependency pass as well (reinsert only direct removals)
    # does diverge, which is what the verification oracle must catch.
    direct_only = state.env.with_elements(
        e.element for e in state.log if e.rule.origin in gone
    )
    assert direct_only != expected


def test_retraction_idempotent(chain_csp):
    state = SolverState.from_root(chain_csp)
    once = retract(state, "c2")
    twice = retract(once, "c2") if "c2" in {c.id for c in once.csp.constraints} else once
    # Retracting again is a no-op on the environment (operators already gone).
    assert twice.env == once.env


def test_retraction_commutes(chain_csp):
    state = SolverState.from_root(chain_csp)
    ab = retract(retract(state, "c1"), "c2")
    ba = retract(retract(state, "c2"), "c1")
    scratch = closure_bruteforce(state.restricted_env, [])
    assert ab.env == ba.env == scratch


def test_branch_state_retraction(conference):
    tree = solve(conference.csp, ["PM"])
    state = SolverState.from_branch(tree, "PM=3")
    for c in conference.csp.constraints:
        assert verify_retraction(state, c.id)


@given(csps(max_vars=3, max_values=3, max_constraints=4))
@settings(max_examples=20)
def test_retraction_matches_from_scratch(csp):
    state = SolverState.from_root(csp)
    for c in csp.constraints:
        assert verify_retraction(state, c.id)


@given(csps(max_vars=3, max_values=3, max_constraints=3))
@settings(max_examples=15)
def test_retraction_pairs_commute(csp):
    if len(csp.constraints) < 2:
        return
    state = SolverState.from_root(csp)
    c1, c2 = csp.constraints[0].id, csp.constraints[1].id
    ab = retract(retract(state, c1), c2).env
    ba = retract(retract(state, c2), c1).env
    remaining = [
        op for oid, op in state.active_ops.items()
        if oid.split(":")[0] not in (c1, c2)
    ]
    scratch = closure_bruteforce(state.restricted_env, remaining)
    assert ab == ba == scratch
