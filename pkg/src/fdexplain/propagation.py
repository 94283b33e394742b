"""Fixpoint propagation: queue-driven closure with a removal log, plus oracles.

The closure of an environment under a set of operators is its greatest
sub-environment that is a common fixpoint of all their reduction steps.
`closure` reaches it with a FIFO worklist (fair because the domain is
finite, so every run is stationary) and records a rule instance for each
removal at the moment it happens, against the environment just before the
firing application. `closure_bruteforce` is the independent oracle: full
sweeps until nothing changes, sharing no scheduling code.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .csp import DomainElement, Environment
from .errors import UsageError
from .operators import (
    LocalConsistencyOperator,
    Operator,
    RestrictionOperator,
    RuleInstance,
    RuleKind,
)


@dataclass(frozen=True)
class LogEntry:
    step: int
    element: DomainElement
    rule: RuleInstance


@dataclass
class RemovalLog:
    """Chronological removals; each element appears at most once."""

    entries: list[LogEntry] = field(default_factory=list)

    def append(self, entry: LogEntry) -> None:
        self.entries.append(entry)

    def elements(self) -> list[DomainElement]:
        return [e.element for e in self.entries]

    def rule_for(self, element: DomainElement) -> RuleInstance | None:
        for e in self.entries:
            if e.element == element:
                return e.rule
        return None

    def __iter__(self) -> Iterator[LogEntry]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class ClosureResult:
    env: Environment
    log: RemovalLog
    steps: int


def _split(ops: Iterable[Operator]) -> tuple[list[RestrictionOperator], list[LocalConsistencyOperator]]:
    restrictions: list[RestrictionOperator] = []
    locals_: list[LocalConsistencyOperator] = []
    for op in ops:
        if isinstance(op, RestrictionOperator):
            restrictions.append(op)
        elif isinstance(op, LocalConsistencyOperator):
            locals_.append(op)
        else:
            raise UsageError(f"not an operator: {op!r}")
    return restrictions, locals_


def _removed(before: Environment, after: Environment, var: str) -> list[DomainElement]:
    return [DomainElement(var, v) for v in sorted(before.values(var) - after.values(var))]


def closure(
    env: Environment,
    ops: Iterable[Operator],
    *,
    seed: Iterable[LocalConsistencyOperator] | None = None,
    stop_on_empty: bool = False,
) -> ClosureResult:
    """Downward closure of env by ops, with one logged rule per removal.

    Restriction operators are constant, so each is applied exactly once up
    front; local operators run off a FIFO queue, re-enqueued whenever a
    w_in variable loses a value. An emptied variable does not abort the
    queue (so failures keep full explanations) unless stop_on_empty is set.
    `seed` restricts the initially queued local operators; re-enqueueing
    still ranges over all of them.
    """
    restrictions, locals_ = _split(ops)
    log = RemovalLog()
    steps = 0
    d = env

    for r in restrictions:
        before = d
        d = r.reduce(d)
        steps += 1
        for el in _removed(before, d, r.var):
            log.append(LogEntry(steps - 1, el, RuleInstance(el, frozenset(), r.id, RuleKind.RESTRICTION)))

    seed_ids = None if seed is None else {op.id for op in seed}
    queue: deque[LocalConsistencyOperator] = deque()
    queued: set[str] = set()
    for op in locals_:
        if seed_ids is None or op.id in seed_ids:
            queue.append(op)
            queued.add(op.id)

    bail = False
    while queue and not bail:
        op = queue.popleft()
        queued.discard(op.id)
        before = d
        d = op.reduce(before)
        steps += 1
        removed = _removed(before, d, op.out_var)
        if not removed:
            continue
        for el in removed:
            log.append(LogEntry(steps - 1, el, op.explain_removal(before, el)))
        if stop_on_empty and not d.values(op.out_var):
            bail = True
            break
        for other in locals_:
            if other.id not in queued and op.out_var in other.w_in:
                queue.append(other)
                queued.add(other.id)

    return ClosureResult(d, log, steps)


def chaotic_iterate(env: Environment, ops: Iterable[Operator], schedule: Sequence[Operator]) -> Environment:
    """Run an explicit finite operator sequence and return its limit.

    Fairness surrogate for finite prefixes of infinite fair runs: every
    operator must appear again after the last application that changed the
    environment. Violations are usage errors, as is a schedule that skips
    an operator entirely.
    """
    ops = list(ops)
    op_ids = {op.id for op in ops}
    scheduled_ids = {op.id for op in schedule}
    if not op_ids <= scheduled_ids:
        missing = sorted(op_ids - scheduled_ids)
        raise UsageError(f"schedule never applies operators {missing}")

    d = env
    last_change = -1
    for i, op in enumerate(schedule):
        nxt = op.reduce(d)
        if nxt != d:
            last_change = i
            d = nxt
    tail_ids = {op.id for op in schedule[last_change + 1:]}
    if not op_ids <= tail_ids:
        missing = sorted(op_ids - tail_ids)
        raise UsageError(f"unfair schedule: operators {missing} never run after the last change")
    return d


def closure_bruteforce(env: Environment, ops: Iterable[Operator]) -> Environment:
    """Oracle closure: repeat full sweeps of all operators until one changes nothing."""
    ops = list(ops)
    d = env
    while True:
        before = d
        for op in ops:
            d = op.reduce(d)
        if d == before:
            return d
