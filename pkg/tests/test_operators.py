import hypothesis.strategies as st
import pytest
from hypothesis import given

from fdexplain.csp import ConstraintSpec, DomainElement, Environment, GlobalDomain, Kind, semantics
from fdexplain.errors import UsageError
from fdexplain.operators import (
    RuleKind,
    arc_operators_for,
    local_operators,
    make_restriction,
    restriction_rules,
)

from .strategies import csp_with_env


def op_by_out(csp, cid, out_var):
    return next(op for op in arc_operators_for(csp.constraint(cid), csp.domain) if op.out_var == out_var)


def env_with(csp, **overrides):
    vals = {v: csp.domain.of(v) for v in csp.variables}
    vals.update(overrides)
    return Environment(csp.domain, vals)


def test_arc_operator_types(conference):
    csp = conference.csp
    neq = arc_operators_for(csp.constraint("c5"), csp.domain)  # AM != PM
    assert [(sorted(o.w_in), o.out_var) for o in neq] == [(["PM"], "AM"), (["AM"], "PM")]
    gt = arc_operators_for(csp.constraint("c2"), csp.domain)  # MA > PM
    assert [(sorted(o.w_in), o.out_var) for o in gt] == [(["PM"], "MA"), (["MA"], "PM")]


def test_arc_operators_table_ternary():
    dom = GlobalDomain({"X": (1, 2), "Y": (1, 2), "Z": (1, 2)})
    c = ConstraintSpec("c1", Kind.TABLE, ("X", "Y", "Z"), tuples=((1, 1, 1), (2, 2, 2)))
    ops = arc_operators_for(c, dom)
    assert [(sorted(o.w_in), o.out_var) for o in ops] == [
        (["Y", "Z"], "X"),
        (["X", "Z"], "Y"),
        (["X", "Y"], "Z"),
    ]


def test_apply_prunes_unsupported(conference):
    csp = conference.csp
    op = op_by_out(csp, "c5", "AM")  # AM != PM, reads PM
    d = env_with(csp, PM={1})
    got = op.apply(d)
    assert got.values("AM") == frozenset({2, 3})
    for var in ("MP", "PM", "MA"):
        assert got.values(var) == frozenset(csp.domain.of(var))


def test_apply_full_is_identity_on_out(conference):
    csp = conference.csp
    op = op_by_out(csp, "c5", "AM")
    assert op.apply(csp.full_env()).values("AM") == frozenset({1, 2, 3})


def test_apply_gt(conference):
    csp = conference.csp
    op = op_by_out(csp, "c1", "MA")  # MA > AM, reads AM
    got = op.apply(env_with(csp, AM={1, 2}))
    assert got.values("MA") == frozenset({2, 3})


def test_reduce_examples(conference):
    csp = conference.csp
    op = op_by_out(csp, "c5", "AM")
    full = csp.full_env()
    assert op.reduce(full) == full
    d = env_with(csp, PM={1})
    assert op.reduce(d) == env_with(csp, PM={1}, AM={2, 3})
    empty = Environment.empty(csp.domain)
    assert op.reduce(empty) == empty


def test_explain_removal_neq(conference):
    csp = conference.csp
    op = op_by_out(csp, "c5", "AM")
    rule = op.explain_removal(env_with(csp, PM={1}), DomainElement("AM", 1))
    assert rule.antecedents == frozenset({DomainElement("PM", 2), DomainElement("PM", 3)})
    assert rule.kind is RuleKind.LOCAL and rule.origin == op.id


def test_explain_removal_gt_chain(conference):
    csp = conference.csp
    mp_from_am = op_by_out(csp, "c3", "MP")  # MP > AM
    rule = mp_from_am.explain_removal(env_with(csp, AM={2, 3}), DomainElement("MP", 2))
    assert rule.antecedents == frozenset({DomainElement("AM", 1)})
    mp_from_pm = op_by_out(csp, "c4", "MP")  # MP > PM
    rule = mp_from_pm.explain_removal(env_with(csp, PM={2, 3}), DomainElement("MP", 2))
    assert rule.antecedents == frozenset({DomainElement("PM", 1)})


def test_explain_removal_still_supported(conference):
    csp = conference.csp
    op = op_by_out(csp, "c5", "AM")
    with pytest.raises(UsageError):
        op.explain_removal(csp.full_env(), DomainElement("AM", 1))


def test_make_restriction(conference):
    dom = conference.csp.domain
    r = make_restriction(dom, "PM", {1})
    got = r.apply(conference.csp.full_env())
    assert got.values("PM") == frozenset({1})
    for var in ("AM", "MP", "MA"):
        assert got.values(var) == frozenset(dom.of(var))

    identity = make_restriction(dom, "PM", {1, 2, 3})
    assert identity.apply() == conference.csp.full_env()

    with pytest.raises(UsageError):
        make_restriction(dom, "PM", ())


def test_restriction_rules(conference):
    dom = conference.csp.domain
    facts = restriction_rules(make_restriction(dom, "PM", {1}))
    assert [(f.conclusion, f.antecedents) for f in facts] == [
        (DomainElement("PM", 2), frozenset()),
        (DomainElement("PM", 3), frozenset()),
    ]
    assert restriction_rules(make_restriction(dom, "PM", {1, 2, 3})) == []
    facts = restriction_rules(make_restriction(dom, "PM", {1, 2}))
    assert [f.conclusion for f in facts] == [DomainElement("PM", 3)]


@given(csp_with_env(max_constraints=3), st.data())
def test_monotonicity(pair, data):
    csp, d2 = pair
    elements = sorted(d2.elements(), key=csp.domain.element_key)
    sub = data.draw(st.sets(st.sampled_from(elements), max_size=len(elements))) if elements else set()
    d1 = Environment.from_elements(csp.domain, sub)
    for op in local_operators(csp):
        assert op.apply(d1).subset_of(op.apply(d2))


@given(csp_with_env(max_constraints=3))
def test_framing(pair):
    csp, d = pair
    for op in local_operators(csp):
        got = op.apply(d)
        for var in csp.variables:
            if var != op.out_var:
                assert got.values(var) == frozenset(csp.domain.of(var))
        assert op.apply(d.restrict(op.w_in)) == got


@given(csp_with_env(max_constraints=3))
def test_solution_preservation(pair):
    csp, d = pair
    for c in csp.constraints:
        for op in arc_operators_for(c, csp.domain):
            for t in semantics(c, csp.domain):
                if t.in_env(d):
                    applied = op.apply(d)
                    assert all(el in applied for el in t.elements() if el.var == op.out_var)


@given(csp_with_env(max_constraints=3), st.data())
def test_emitted_rules_sound(pair, data):
    csp, d = pair
    for op in local_operators(csp):
        applied = op.apply(d)
        removed = [
            DomainElement(op.out_var, v)
            for v in csp.domain.of(op.out_var)
            if DomainElement(op.out_var, v) not in applied
        ]
        for h in removed:
            rule = op.explain_removal(d, h)
            elements = [el for el in csp.domain.elements() if el not in rule.antecedents]
            probe = data.draw(st.sets(st.sampled_from(elements), max_size=len(elements))) if elements else set()
            env = Environment.from_elements(csp.domain, probe)
            assert h not in op.apply(env)


@given(csp_with_env(max_constraints=0), st.data())
def test_restriction_operators_constant(pair, data):
    csp, d1 = pair
    elements = list(csp.domain.elements())
    probe = data.draw(st.sets(st.sampled_from(elements), max_size=len(elements)))
    d2 = Environment.from_elements(csp.domain, probe)
    var = data.draw(st.sampled_from(csp.variables))
    kept = data.draw(st.sets(st.sampled_from(csp.domain.of(var)), min_size=1))
    r = make_restriction(csp.domain, var, kept)
    assert r.apply(d1) == r.apply(d2)


@given(csp_with_env(max_constraints=3))
def test_reduce_contracting_and_idempotent(pair):
    csp, d = pair
    for op in local_operators(csp):
        once = op.reduce(d)
        assert once.subset_of(d)
        assert op.reduce(once) == once
