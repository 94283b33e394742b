"""JSON export of a solve: model, search tree, removal logs, proof trees.

The bundle is the wire format the browser viewer consumes. Serialization is
canonical (sorted keys, no whitespace, UTF-8) so identical solves export
byte-identical files and import/export round-trips losslessly. The schema
is versioned and evolves additively.
"""

from __future__ import annotations

import json
from typing import Any, Mapping, Optional

from .csp import DomainElement, Environment, Kind
from .errors import UsageError
from .explanations import ExplanationStore, ProofTree
from .operators import RuleKind
from .propagation import LogEntry
from .search import SearchNode, SearchTree

BUNDLE_VERSION = 1


def _element(el: DomainElement) -> dict:
    return {"value": el.value, "var": el.var}


def _env(env: Environment) -> dict:
    return {var: sorted(env.values(var)) for var in env.domain.variables}


def _log_entry(entry: LogEntry) -> dict:
    rule = entry.rule
    return {
        "antecedents": [_element(a) for a in sorted(rule.antecedents)],
        "element": _element(entry.element),
        "origin": rule.origin,
        "step": entry.step,
    }


def _proof_tree(pt: ProofTree, branch_rank: Mapping[str, int]) -> dict:
    ctx = sorted(pt.judgment.context, key=lambda b: branch_rank.get(b, len(branch_rank)))
    return {
        "children": [_proof_tree(c, branch_rank) for c in pt.children],
        "judgment": {
            "context": ctx,
            "value": pt.judgment.element.value,
            "var": pt.judgment.element.var,
        },
        "origin": pt.origin,
        "ruleKind": pt.kind.value,
    }


def _tree_nodes(tree: SearchTree) -> list[dict]:
    nodes = []

    def visit(node: SearchNode, parent: Optional[str]) -> None:
        closure = None
        if node.closure_result is not None:
            closure = [_log_entry(e) for e in node.closure_result.log]
        nodes.append({
            "arriving": node.arriving,
            "closure": closure,
            "depth": node.depth,
            "env": _env(node.env),
            "facts": [_log_entry(e) for e in node.restriction_facts],
            "id": node.branch_id,
            "parent": parent,
            "partition": None if node.part is None else {
                "cells": [list(c) for c in node.part.cells],
                "var": node.part.var,
            },
            "restrictedEnv": _env(node.restricted_env),
            "status": None if node.status is None else node.status.value,
        })
        for child in node.children:
            visit(child, node.branch_id)

    visit(tree.root, None)
    return nodes


def export_bundle(tree: SearchTree, store: ExplanationStore, transcript: Optional[dict] = None) -> dict:
    """Assemble the whole solve into one JSON-ready dictionary."""
    csp = tree.csp
    branch_rank = {leaf.branch_id: leaf.leaf_ordinal for leaf in tree.leaves}

    constraints = []
    for c in csp.constraints:
        entry: dict[str, Any] = {"id": c.id, "kind": c.kind.value, "scope": list(c.scope)}
        if c.kind is Kind.TABLE:
            entry["tuples"] = [list(t) for t in c.tuples]
        else:
            entry["offset"] = c.offset
        constraints.append(entry)

    operators: dict[str, dict] = {"local": {}, "restriction": {}}
    for op in tree.local_ops:
        operators["local"][op.id] = {
            "constraint": op.constraint.id,
            "out": op.out_var,
            "reads": sorted(op.w_in),
        }
    for rop in tree.restriction_ops.values():
        operators["restriction"][rop.id] = {"kept": sorted(rop.kept), "var": rop.var}

    solutions = sorted(
        ({var: t[var] for var in csp.variables} for t in
         (leaf.solution for leaf in tree.leaves if leaf.solution is not None)),
        key=lambda b: tuple(b[v] for v in csp.variables),
    )

    proof_trees = [
        _proof_tree(store.explain(el), branch_rank)
        for el in store.removed_elements()
    ]

    bundle = {
        "csp": {
            "constraints": constraints,
            "label": [
                {"strategy": tree.strategy_for(v).value, "var": v}
                for v in tree.label_vars
            ],
            "variables": [{"name": v, "values": list(csp.domain.of(v))} for v in csp.variables],
        },
        "operators": operators,
        "proofTrees": proof_trees,
        "solutions": solutions,
        "tree": _tree_nodes(tree),
        "version": BUNDLE_VERSION,
    }
    if transcript is not None:
        bundle["transcript"] = transcript
    return bundle


def bundle_json(bundle: Mapping) -> str:
    """Canonical serialization: sorted keys, compact separators, raw UTF-8."""
    return json.dumps(bundle, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def validate_bundle(bundle: Mapping) -> None:
    """Referential integrity scan; raises UsageError on the first dangling id."""
    if bundle.get("version") != BUNDLE_VERSION:
        raise UsageError(f"unsupported bundle version {bundle.get('version')!r}")
    ops = bundle.get("operators", {})
    known_ops = set(ops.get("local", {})) | set(ops.get("restriction", {}))
    constraint_ids = {c["id"] for c in bundle.get("csp", {}).get("constraints", ())}
    for op_id, op in ops.get("local", {}).items():
        if op["constraint"] not in constraint_ids:
            raise UsageError(f"operator {op_id!r} references unknown constraint {op['constraint']!r}")
    node_ids = {n["id"] for n in bundle.get("tree", ())}
    for node in bundle.get("tree", ()):
        if node["parent"] is not None and node["parent"] not in node_ids:
            raise UsageError(f"node {node['id']!r} has an unknown parent")
        for entry in (node.get("facts") or []) + (node.get("closure") or []):
            if entry["origin"] not in known_ops:
                raise UsageError(f"log entry references unknown operator {entry['origin']!r}")

    def check_tree(pt: Mapping) -> None:
        if pt["ruleKind"] != RuleKind.LABELING.value and pt["origin"] not in known_ops:
            raise UsageError(f"proof tree references unknown operator {pt['origin']!r}")
        for b in pt["judgment"]["context"]:
            if b not in node_ids:
                raise UsageError(f"proof tree context references unknown branch {b!r}")
        for child in pt["children"]:
            check_tree(child)

    for pt in bundle.get("proofTrees", ()):
        check_tree(pt)


def import_bundle(text: str) -> dict:
    """Parse and validate a bundle file; round-trips byte-identically through bundle_json."""
    try:
        bundle = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"not a bundle: {exc}") from None
    if not isinstance(bundle, dict):
        raise UsageError("not a bundle: top level must be an object")
    validate_bundle(bundle)
    return bundle
