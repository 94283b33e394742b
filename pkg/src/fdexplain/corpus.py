"""Seeded random CSP corpus for the acceptance suite and experiment scripts."""

from __future__ import annotations

import itertools
import random
from typing import Sequence

from .csp import COMPARISON_KINDS, ConstraintSpec, Csp, Environment, GlobalDomain, Kind
from .operators import Operator, RestrictionOperator, make_restriction

VAR_NAMES = ("W", "X", "Y", "Z")


def random_csp(
    rng: random.Random,
    max_vars: int = 4,
    max_values: int = 4,
    max_constraints: int = 5,
    allow_tables: bool = True,
) -> Csp:
    n = rng.randint(1, max_vars)
    variables = VAR_NAMES[:n]
    domains = {
        v: tuple(sorted(rng.sample(range(1, max_values + 1), rng.randint(1, max_values))))
        for v in variables
    }
    domain = GlobalDomain(domains)

    constraints = []
    for i in range(rng.randint(0, max_constraints)):
        cid = f"c{i + 1}"
        if n >= 2 and (not allow_tables or rng.random() < 0.7):
            x, y = rng.sample(variables, 2)
            kind = rng.choice(COMPARISON_KINDS)
            constraints.append(ConstraintSpec(cid, kind, (x, y), offset=rng.randint(-2, 2)))
        else:
            scope = tuple(rng.sample(variables, rng.randint(1, min(3, n))))
            space = list(itertools.product(*(domains[v] for v in scope)))
            keep = rng.sample(space, rng.randint(1, len(space)))
            constraints.append(ConstraintSpec(cid, Kind.TABLE, scope, tuples=tuple(sorted(keep))))
    return Csp(variables, domain, tuple(constraints))


def random_env(rng: random.Random, csp: Csp, keep_chance: float = 0.8) -> Environment:
    picked = [el for el in csp.domain.elements() if rng.random() < keep_chance]
    return Environment.from_elements(csp.domain, picked)


def random_restrictions(rng: random.Random, csp: Csp, max_ops: int = 2) -> list[RestrictionOperator]:
    out = []
    for var in rng.sample(csp.variables, min(len(csp.variables), rng.randint(0, max_ops))):
        values = csp.domain.of(var)
        kept = rng.sample(values, rng.randint(1, len(values)))
        out.append(make_restriction(csp.domain, var, kept))
    return out


def fair_schedule(rng: random.Random, ops: Sequence[Operator], domain_size: int) -> list[Operator]:
    """A random prefix followed by enough full sweeps to guarantee a clean final sweep.

    Each changing sweep removes at least one element, so domain_size + 1
    sweeps always end with a full sweep after the last change.
    """
    prefix = [rng.choice(ops) for _ in range(rng.randint(0, 3 * len(ops)))] if ops else []
    return prefix + list(ops) * (domain_size + 1)


_STRICTER = {
    Kind.GE: Kind.GT,
    Kind.LE: Kind.LT,
    Kind.GT: Kind.GE,
    Kind.LT: Kind.LE,
    Kind.EQ: Kind.LE,
    Kind.NEQ: Kind.EQ,
}


def mutate_constraint(rng: random.Random, csp: Csp) -> tuple[Csp, str] | None:
    """Flip one comparison's kind or offset; returns (mutated CSP, constraint id)."""
    candidates = [c for c in csp.constraints if c.kind is not Kind.TABLE]
    if not candidates:
        return None
    victim = rng.choice(candidates)
    if rng.random() < 0.5:
        mutated = ConstraintSpec(victim.id, _STRICTER[victim.kind], victim.scope, victim.offset)
    else:
        mutated = ConstraintSpec(victim.id, victim.kind, victim.scope, victim.offset + rng.choice((-1, 1)))
    constraints = tuple(mutated if c.id == victim.id else c for c in csp.constraints)
    return Csp(csp.variables, csp.domain, constraints), victim.id
