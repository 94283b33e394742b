"""Core finite-domain model: global domain, environments, constraints, solutions.

Values are plain integers. The global domain is the set of all
(variable, value) pairs; an environment is any subset of it, and domain
reduction only ever shrinks environments. Variable order is declaration
order and is the tie-break used everywhere determinism matters.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Mapping, NamedTuple

from .errors import UsageError

DEFAULT_ENUMERATION_CAP = 10_000_000


class DomainElement(NamedTuple):
    """One (variable, value) pair of the global domain."""

    var: str
    value: int

    def __str__(self) -> str:
        return f"({self.var},{self.value})"


@dataclass(frozen=True)
class GlobalDomain:
    """Per-variable candidate values, in declaration order; every set non-empty."""

    per_var: Mapping[str, tuple[int, ...]]

    def __post_init__(self):
        cleaned: dict[str, tuple[int, ...]] = {}
        for var, vals in self.per_var.items():
            vals = tuple(sorted(set(vals)))
            if not vals:
                raise UsageError(f"variable {var!r} has an empty domain")
            cleaned[var] = vals
        object.__setattr__(self, "per_var", cleaned)
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(cleaned)})

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(self.per_var)

    def of(self, var: str) -> tuple[int, ...]:
        try:
            return self.per_var[var]
        except KeyError:
            raise UsageError(f"unknown variable {var!r}") from None

    def index(self, var: str) -> int:
        idx = self._index.get(var)  # type: ignore[attr-defined]
        if idx is None:
            raise UsageError(f"unknown variable {var!r}")
        return idx

    def element_key(self, el: DomainElement) -> tuple[int, int]:
        """Sort key: declaration order of the variable, then value."""
        return (self.index(el.var), el.value)

    def elements(self) -> Iterator[DomainElement]:
        for var, vals in self.per_var.items():
            for v in vals:
                yield DomainElement(var, v)

    def size(self) -> int:
        return sum(len(vals) for vals in self.per_var.values())


class Environment:
    """An immutable subset of the global domain, stored per-variable.

    Carries its domain so complements are well-defined. Equality is
    extensional: two environments over equal domains with the same members
    are equal.
    """

    __slots__ = ("domain", "_vals")

    def __init__(self, domain: GlobalDomain, per_var: Mapping[str, Iterable[int]] | None = None):
        vals: dict[str, frozenset[int]] = {}
        per_var = dict(per_var or {})
        for var in domain.variables:
            chosen = frozenset(per_var.pop(var, ()))
            extra = chosen - set(domain.of(var))
            if extra:
                raise UsageError(f"values {sorted(extra)} not in the domain of {var!r}")
            vals[var] = chosen
        if per_var:
            raise UsageError(f"unknown variable {next(iter(per_var))!r}")
        self.domain = domain
        self._vals = vals

    @classmethod
    def _trusted(cls, domain: GlobalDomain, vals: dict[str, frozenset[int]]) -> "Environment":
        # Internal fast path: vals must already cover every variable with
        # in-domain frozensets.
        env = cls.__new__(cls)
        env.domain = domain
        env._vals = vals
        return env

    @classmethod
    def full(cls, domain: GlobalDomain) -> "Environment":
        return cls._trusted(domain, {v: frozenset(domain.of(v)) for v in domain.variables})

    @classmethod
    def empty(cls, domain: GlobalDomain) -> "Environment":
        return cls._trusted(domain, {v: frozenset() for v in domain.variables})

    @classmethod
    def from_elements(cls, domain: GlobalDomain, elements: Iterable[DomainElement]) -> "Environment":
        per_var: dict[str, set[int]] = {}
        for el in elements:
            per_var.setdefault(el.var, set()).add(el.value)
        return cls(domain, per_var)

    def values(self, var: str) -> frozenset[int]:
        try:
            return self._vals[var]
        except KeyError:
            raise UsageError(f"unknown variable {var!r}") from None

    def as_dict(self) -> dict[str, frozenset[int]]:
        return dict(self._vals)

    def elements(self) -> Iterator[DomainElement]:
        for var, vals in self._vals.items():
            for v in sorted(vals):
                yield DomainElement(var, v)

    def missing(self) -> Iterator[DomainElement]:
        """Elements of the global domain that are not in this environment."""
        for var in self.domain.variables:
            present = self._vals[var]
            for v in self.domain.of(var):
                if v not in present:
                    yield DomainElement(var, v)

    def __contains__(self, el: DomainElement) -> bool:
        vals = self._vals.get(el.var)
        return vals is not None and el.value in vals

    def restrict(self, variables: Iterable[str]) -> "Environment":
        """d|_W: keep only the pairs whose variable is in W."""
        keep = set(variables)
        for var in keep:
            if var not in self._vals:
                raise UsageError(f"unknown variable {var!r}")
        return Environment._trusted(
            self.domain,
            {v: vals if v in keep else frozenset() for v, vals in self._vals.items()},
        )

    def intersect(self, other: "Environment") -> "Environment":
        return Environment._trusted(
            self.domain, {v: vals & other.values(v) for v, vals in self._vals.items()}
        )

    def with_elements(self, elements: Iterable[DomainElement]) -> "Environment":
        per_var = {v: set(vals) for v, vals in self._vals.items()}
        for el in elements:
            per_var[el.var].add(el.value)
        return Environment(self.domain, per_var)

    def without_elements(self, elements: Iterable[DomainElement]) -> "Environment":
        per_var = {v: set(vals) for v, vals in self._vals.items()}
        for el in elements:
            per_var[el.var].discard(el.value)
        return Environment(self.domain, per_var)

    def subset_of(self, other: "Environment") -> bool:
        return all(vals <= other.values(var) for var, vals in self._vals.items())

    def empty_vars(self) -> tuple[str, ...]:
        return tuple(v for v, vals in self._vals.items() if not vals)

    def all_singleton(self) -> bool:
        return all(len(vals) == 1 for vals in self._vals.values())

    def count(self) -> int:
        return sum(len(vals) for vals in self._vals.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Environment):
            return NotImplemented
        return self.domain == other.domain and self._vals == other._vals

    def __ne__(self, other: object) -> bool:
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Environment({self.describe()})"

    def describe(self) -> str:
        parts = []
        for var in self.domain.variables:
            vals = ",".join(str(v) for v in sorted(self._vals[var]))
            parts.append(f"{var}∈{{{vals}}}")
        return " ".join(parts)


class Kind(Enum):
    EQ = "="
    NEQ = "!="
    LT = "<"
    LE = "<="
    GT = ">"
    GE = ">="
    TABLE = "table"


_COMPARATORS = {
    Kind.EQ: lambda a, b: a == b,
    Kind.NEQ: lambda a, b: a != b,
    Kind.LT: lambda a, b: a < b,
    Kind.LE: lambda a, b: a <= b,
    Kind.GT: lambda a, b: a > b,
    Kind.GE: lambda a, b: a >= b,
}

COMPARISON_KINDS = tuple(_COMPARATORS)


@dataclass(frozen=True)
class ConstraintSpec:
    """A constraint: either `x <op> y + k` over two variables, or an explicit table.

    Either form is ultimately just its set of allowed tuples; everything
    downstream (operators, rules) is derived from that set.
    """

    id: str
    kind: Kind
    scope: tuple[str, ...]
    offset: int = 0
    tuples: tuple[tuple[int, ...], ...] = ()

    def validate(self, domain: GlobalDomain) -> None:
        if len(set(self.scope)) != len(self.scope):
            raise UsageError(f"constraint {self.id}: scope repeats a variable")
        for var in self.scope:
            domain.of(var)
        if self.kind is Kind.TABLE:
            for t in self.tuples:
                if len(t) != len(self.scope):
                    raise UsageError(f"constraint {self.id}: tuple {t} does not match the scope arity")
                for var, v in zip(self.scope, t):
                    if v not in domain.of(var):
                        raise UsageError(f"constraint {self.id}: value {v} outside the domain of {var!r}")
        else:
            if len(self.scope) != 2:
                raise UsageError(f"constraint {self.id}: comparison constraints take exactly two variables")
            if self.tuples:
                raise UsageError(f"constraint {self.id}: only table constraints carry tuples")

    def pretty(self) -> str:
        if self.kind is Kind.TABLE:
            cells = " ".join("(" + ",".join(str(v) for v in t) + ")" for t in self.tuples)
            return f"table({','.join(self.scope)}) {{ {cells} }}"
        x, y = self.scope
        rhs = y if self.offset == 0 else f"{y} + {self.offset}"
        return f"{x} {self.kind.value} {rhs}"


@dataclass(frozen=True)
class TupleAssignment:
    """A tuple on a variable set: each scope variable bound to exactly one value.

    Normalized by variable name so equal bindings compare equal regardless
    of the order they were given in.
    """

    scope: tuple[str, ...]
    values: tuple[int, ...]

    def __post_init__(self):
        if len(self.scope) != len(self.values):
            raise UsageError("scope and values differ in length")
        if len(set(self.scope)) != len(self.scope):
            raise UsageError("a tuple binds each variable exactly once")
        pairs = sorted(zip(self.scope, self.values))
        object.__setattr__(self, "scope", tuple(p[0] for p in pairs))
        object.__setattr__(self, "values", tuple(p[1] for p in pairs))

    @classmethod
    def of(cls, binding: Mapping[str, int]) -> "TupleAssignment":
        return cls(tuple(binding), tuple(binding.values()))

    @property
    def binding(self) -> dict[str, int]:
        return dict(zip(self.scope, self.values))

    def __getitem__(self, var: str) -> int:
        try:
            return self.values[self.scope.index(var)]
        except ValueError:
            raise KeyError(var) from None

    def restrict_to(self, variables: Iterable[str]) -> "TupleAssignment":
        keep = set(variables)
        pairs = [(v, val) for v, val in zip(self.scope, self.values) if v in keep]
        return TupleAssignment(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))

    def elements(self) -> tuple[DomainElement, ...]:
        return tuple(DomainElement(v, val) for v, val in zip(self.scope, self.values))

    def in_env(self, env: Environment) -> bool:
        return all(el in env for el in self.elements())


def satisfies(c: ConstraintSpec, binding: Mapping[str, int]) -> bool:
    """Whether a binding of c's scope is one of c's allowed tuples."""
    if c.kind is Kind.TABLE:
        return tuple(binding[v] for v in c.scope) in set(c.tuples)
    x, y = c.scope
    return _COMPARATORS[c.kind](binding[x], binding[y] + c.offset)


def semantics(c: ConstraintSpec, domain: GlobalDomain) -> frozenset[TupleAssignment]:
    """All scope tuples allowed by c, within the given domain."""
    c.validate(domain)
    out = []
    for combo in itertools.product(*(domain.of(v) for v in c.scope)):
        binding = dict(zip(c.scope, combo))
        if satisfies(c, binding):
            out.append(TupleAssignment.of(binding))
    return frozenset(out)


@dataclass(frozen=True)
class Csp:
    """Variables (ordered), their domains, and the constraints over them."""

    variables: tuple[str, ...]
    domain: GlobalDomain
    constraints: tuple[ConstraintSpec, ...] = ()

    def __post_init__(self):
        if len(set(self.variables)) != len(self.variables):
            raise UsageError("variable names must be unique")
        if self.variables != self.domain.variables:
            raise UsageError("declared variables and domain variables must match in order")
        seen = set()
        for c in self.constraints:
            if c.id in seen:
                raise UsageError(f"duplicate constraint id {c.id!r}")
            seen.add(c.id)
            c.validate(self.domain)

    def full_env(self) -> Environment:
        return Environment.full(self.domain)

    def constraint(self, cid: str) -> ConstraintSpec:
        for c in self.constraints:
            if c.id == cid:
                return c
        raise UsageError(f"unknown constraint {cid!r}")


def is_solution(csp: Csp, t: TupleAssignment) -> bool:
    """Whether t (a tuple on all variables) satisfies every constraint."""
    if set(t.scope) != set(csp.variables):
        raise UsageError("a solution candidate must bind every variable")
    binding = t.binding
    return all(satisfies(c, binding) for c in csp.constraints)


def solutions_bruteforce(csp: Csp, cap: int = DEFAULT_ENUMERATION_CAP) -> frozenset[TupleAssignment]:
    """Exhaustive solution enumeration; the independent oracle for everything else."""
    total = 1
    for var in csp.variables:
        total *= len(csp.domain.of(var))
    if total > cap:
        raise UsageError(f"enumeration of {total} tuples exceeds the cap of {cap}")
    out = []
    for combo in itertools.product(*(csp.domain.of(v) for v in csp.variables)):
        t = TupleAssignment(csp.variables, combo)
        if is_solution(csp, t):
            out.append(t)
    return frozenset(out)
