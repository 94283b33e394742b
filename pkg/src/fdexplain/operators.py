"""Reduction operators and the rules they fire.

Two operator families drive domain reduction: local-consistency operators
(generalized arc consistency, one per constraint scope variable) and
restriction operators (a labeling choice pinning one variable to a kept
value set). Both can report, for any single removal they cause, the rule
instance justifying it: the conclusion plus the absent antecedents that
forced it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

from .csp import ConstraintSpec, Csp, DomainElement, Environment, GlobalDomain, semantics
from .errors import UsageError


class RuleKind(Enum):
    LOCAL = "LOCAL"
    RESTRICTION = "RESTRICTION"
    LABELING = "LABELING"


@dataclass(frozen=True)
class OperatorType:
    """Reads w_in, writes w_out; the operator ignores everything else."""

    w_in: frozenset[str]
    w_out: frozenset[str]


@dataclass(frozen=True)
class RuleInstance:
    """One fired rule: with all antecedents absent, the conclusion cannot survive.

    Soundness contract: for the originating local operator l, every
    environment disjoint from the antecedents satisfies conclusion ∉ l(d).
    Restriction rules are facts (no antecedents).
    """

    conclusion: DomainElement
    antecedents: frozenset[DomainElement]
    origin: str
    kind: RuleKind


@dataclass(frozen=True, eq=False)
class LocalConsistencyOperator:
    """Generalized arc consistency for one constraint, pruning one scope variable.

    `supports` maps each candidate value of the pruned variable to the
    w_in parts of its supporting tuples, each part sorted by variable
    declaration order then value.
    """

    id: str
    constraint: ConstraintSpec
    out_var: str
    domain: GlobalDomain
    supports: Mapping[int, tuple[tuple[DomainElement, ...], ...]] = field(repr=False)

    @property
    def w_in(self) -> frozenset[str]:
        return frozenset(v for v in self.constraint.scope if v != self.out_var)

    @property
    def w_out(self) -> frozenset[str]:
        return frozenset({self.out_var})

    @property
    def type(self) -> OperatorType:
        return OperatorType(self.w_in, self.w_out)

    def supported(self, value: int, env: Environment) -> bool:
        return any(all(m in env for m in part) for part in self.supports.get(value, ()))

    def apply(self, env: Environment) -> Environment:
        """f(d): full off w_out; on w_out exactly the values supported by d|_{w_in}."""
        per_var = {v: frozenset(self.domain.of(v)) for v in self.domain.variables}
        per_var[self.out_var] = frozenset(
            v for v in self.domain.of(self.out_var) if self.supported(v, env)
        )
        return Environment._trusted(self.domain, per_var)

    def reduce(self, env: Environment) -> Environment:
        """The contracting step d ∩ f(d) actually used during propagation."""
        return env.intersect(self.apply(env))

    def explain_removal(self, env: Environment, h: DomainElement) -> RuleInstance:
        """Justify h ∉ apply(env): one absent witness per lost supporting tuple.

        The witness for each tuple is its smallest absent member by variable
        order then value; duplicates across tuples collapse into a set.
        """
        if h.var != self.out_var:
            raise UsageError(f"{h} is not pruned by operator {self.id} (writes {self.out_var})")
        if h.value not in self.domain.of(h.var):
            raise UsageError(f"{h} is not in the global domain")
        antecedents = set()
        for part in self.supports.get(h.value, ()):
            witness = next((m for m in part if m not in env), None)
            if witness is None:
                raise UsageError(f"{h} is still supported; there is no removal to explain")
            antecedents.add(witness)
        return RuleInstance(h, frozenset(antecedents), self.id, RuleKind.LOCAL)


@dataclass(frozen=True, eq=False)
class RestrictionOperator:
    """Constant operator pinning `var` to `kept`; the mechanism of labeling."""

    id: str
    var: str
    kept: frozenset[int]
    domain: GlobalDomain

    @property
    def w_out(self) -> frozenset[str]:
        return frozenset({self.var})

    def apply(self, env: Environment | None = None) -> Environment:
        # Constant: the argument is ignored.
        per_var = {v: frozenset(self.domain.of(v)) for v in self.domain.variables}
        per_var[self.var] = self.kept
        return Environment._trusted(self.domain, per_var)

    def reduce(self, env: Environment) -> Environment:
        return env.intersect(self.apply())

    def excluded(self) -> tuple[DomainElement, ...]:
        """The elements removed globally: 𝔻 minus the operator's constant image."""
        return tuple(DomainElement(self.var, v) for v in self.domain.of(self.var) if v not in self.kept)


Operator = LocalConsistencyOperator | RestrictionOperator


def cell_label(var: str, values: Iterable[int]) -> str:
    vals = sorted(values)
    if len(vals) == 1:
        return f"{var}={vals[0]}"
    return f"{var}∈{{{','.join(str(v) for v in vals)}}}"


def make_restriction(domain: GlobalDomain, var: str, kept: Iterable[int], op_id: str | None = None) -> RestrictionOperator:
    kept_set = frozenset(kept)
    if not kept_set:
        raise UsageError(f"restriction on {var!r} must keep at least one value")
    outside = kept_set - set(domain.of(var))
    if outside:
        raise UsageError(f"kept values {sorted(outside)} are outside the domain of {var!r}")
    return RestrictionOperator(op_id or cell_label(var, kept_set), var, kept_set, domain)


def restriction_rules(r: RestrictionOperator) -> list[RuleInstance]:
    """One fact per element the restriction excludes from the global domain."""
    return [RuleInstance(el, frozenset(), r.id, RuleKind.RESTRICTION) for el in r.excluded()]


def arc_operators_for(c: ConstraintSpec, domain: GlobalDomain) -> list[LocalConsistencyOperator]:
    """One pruning operator per scope variable, each of type (scope∖{y}, {y})."""
    c.validate(domain)
    tuples = sorted(semantics(c, domain), key=lambda t: t.values)
    ops = []
    for y in c.scope:
        supports: dict[int, list[tuple[DomainElement, ...]]] = {}
        for t in tuples:
            part = tuple(sorted(
                (DomainElement(v, t[v]) for v in c.scope if v != y),
                key=domain.element_key,
            ))
            supports.setdefault(t[y], []).append(part)
        ops.append(LocalConsistencyOperator(
            id=f"{c.id}:{y}",
            constraint=c,
            out_var=y,
            domain=domain,
            supports={v: tuple(parts) for v, parts in supports.items()},
        ))
    return ops


def local_operators(csp: Csp) -> list[LocalConsistencyOperator]:
    """The canonical operator set L: arc operators of every constraint, in order."""
    return [op for c in csp.constraints for op in arc_operators_for(c, csp.domain)]
