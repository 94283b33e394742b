"""Plain-text model files: parsing and printing.

Line-oriented grammar, `#` starts a comment:

    var <NAME> in <lo>..<hi>
    var <NAME> in {v1,v2,...}
    constraint <X> <op> <Y> [+ <k>]      op in  =  !=  <  <=  >  >=
    constraint table(<X>,<Y>,...) { (a,b,...) (c,d,...) ... }
    label <NAME> [enumerate|split]       line order = labeling order

Constraints are numbered c1, c2, ... in declaration order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .csp import ConstraintSpec, Csp, GlobalDomain, Kind
from .errors import ModelSyntaxError, UsageError
from .search import Strategy

_VAR_RANGE = re.compile(r"var\s+(\w+)\s+in\s+(-?\d+)\s*\.\.\s*(-?\d+)\s*$")
_VAR_SET = re.compile(r"var\s+(\w+)\s+in\s+\{([^}]*)\}\s*$")
_COMPARISON = re.compile(r"constraint\s+(\w+)\s*(!=|<=|>=|=|<|>)\s*(\w+)(?:\s*\+\s*(-?\d+))?\s*$")
_TABLE = re.compile(r"constraint\s+table\(([^)]*)\)\s*\{(.*)\}\s*$")
_TABLE_CELL = re.compile(r"\(([^)]*)\)")
_LABEL = re.compile(r"label\s+(\w+)(?:\s+(enumerate|split))?\s*$")

_OPS = {k.value: k for k in Kind if k is not Kind.TABLE}


@dataclass(frozen=True)
class Model:
    csp: Csp
    labels: tuple[tuple[str, Strategy], ...]


def _ints(raw: str, lineno: int) -> list[int]:
    raw = raw.strip()
    if not raw:
        return []
    try:
        return [int(tok.strip()) for tok in raw.split(",")]
    except ValueError:
        raise ModelSyntaxError(f"expected a comma-separated integer list, got {raw!r}", lineno) from None


def parse_model(text: str) -> Model:
    domains: dict[str, tuple[int, ...]] = {}
    constraints: list[ConstraintSpec] = []
    labels: list[tuple[str, Strategy]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head = line.split(None, 1)[0]

        if head == "var":
            m = _VAR_RANGE.match(line)
            if m:
                name, lo, hi = m.group(1), int(m.group(2)), int(m.group(3))
                values = tuple(range(lo, hi + 1))
            else:
                m = _VAR_SET.match(line)
                if not m:
                    raise ModelSyntaxError("malformed var declaration", lineno)
                name = m.group(1)
                values = tuple(_ints(m.group(2), lineno))
            if name in domains:
                raise ModelSyntaxError(f"duplicate variable {name!r}", lineno)
            if not values:
                raise ModelSyntaxError(f"variable {name!r} has an empty domain", lineno)
            domains[name] = values
            continue

        if head == "constraint":
            cid = f"c{len(constraints) + 1}"
            m = _TABLE.match(line)
            if m:
                scope = tuple(v.strip() for v in m.group(1).split(","))
                cells = _TABLE_CELL.findall(m.group(2))
                tuples = tuple(tuple(_ints(cell, lineno)) for cell in cells)
                spec = ConstraintSpec(cid, Kind.TABLE, scope, tuples=tuples)
            else:
                m = _COMPARISON.match(line)
                if not m:
                    column = len(line.split()[1]) + 12 if len(line.split()) > 1 else 11
                    raise ModelSyntaxError("malformed constraint (bad operator or operands)", lineno, column)
                x, op, y, k = m.groups()
                spec = ConstraintSpec(cid, _OPS[op], (x, y), offset=int(k) if k else 0)
            for var in spec.scope:
                if var not in domains:
                    raise ModelSyntaxError(f"unknown variable {var!r}", lineno)
            try:
                spec.validate(GlobalDomain(domains))
            except UsageError as exc:
                raise ModelSyntaxError(str(exc), lineno) from None
            constraints.append(spec)
            continue

        if head == "label":
            m = _LABEL.match(line)
            if not m:
                raise ModelSyntaxError("malformed label directive", lineno)
            name, strat = m.group(1), m.group(2) or "enumerate"
            if name not in domains:
                raise ModelSyntaxError(f"unknown variable {name!r}", lineno)
            labels.append((name, Strategy(strat)))
            continue

        raise ModelSyntaxError(f"unrecognized directive {head!r}", lineno, 1)

    csp = Csp(tuple(domains), GlobalDomain(domains), tuple(constraints))
    return Model(csp, tuple(labels))


def _domain_text(values: tuple[int, ...]) -> str:
    if len(values) == values[-1] - values[0] + 1:
        return f"{values[0]}..{values[-1]}"
    return "{" + ",".join(str(v) for v in values) + "}"


def print_model(model: Model) -> str:
    lines = []
    for var in model.csp.variables:
        lines.append(f"var {var} in {_domain_text(model.csp.domain.of(var))}")
    for c in model.csp.constraints:
        if c.kind is Kind.TABLE:
            cells = " ".join("(" + ",".join(str(v) for v in t) + ")" for t in c.tuples)
            lines.append(f"constraint table({','.join(c.scope)}) {{ {cells} }}")
        else:
            x, y = c.scope
            suffix = f" + {c.offset}" if c.offset else ""
            lines.append(f"constraint {x} {c.kind.value} {y}{suffix}")
    for var, strat in model.labels:
        lines.append(f"label {var} {strat.value}")
    return "\n".join(lines) + "\n"
