"""Command-line front end.

Verbs: solve, explain, failure, retract, export, check. Exit codes: 0 on
success, 1 when the result itself is a domain failure (or a check fails),
2 on usage or parse errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Mapping, Optional, Sequence

from .bundle import bundle_json, export_bundle, import_bundle
from .csp import DomainElement, solutions_bruteforce
from .errors import UsageError
from .explanations import ExplanationStore, ProofTree, verify_proof_tree
from .model_io import Model, parse_model
from .operators import LocalConsistencyOperator, Operator, RuleKind
from .propagation import closure, closure_bruteforce
from .retraction import SolverState, retract, verify_retraction
from .search import LeafStatus, SearchTree, solve, solutions, is_complete


def _load(path: str) -> Model:
    return parse_model(Path(path).read_text(encoding="utf-8"))


def _solve_model(model: Model) -> SearchTree:
    label_vars = [v for v, _ in model.labels]
    strategies = dict(model.labels)
    return solve(model.csp, label_vars, strategies)


def _judgment_text(pt: ProofTree) -> str:
    ctx = ",".join(sorted(pt.judgment.context))
    return f"{{{ctx}}} |- {pt.judgment.element}"


def _rule_text(pt: ProofTree, ops: Mapping[str, Operator]) -> str:
    if pt.kind is RuleKind.LABELING:
        return "merge"
    if pt.kind is RuleKind.RESTRICTION:
        return f"choice {pt.origin}"
    op = ops.get(pt.origin)
    if isinstance(op, LocalConsistencyOperator):
        return op.constraint.pretty()
    return pt.origin


def render_proof_tree(pt: ProofTree, ops: Mapping[str, Operator], indent: int = 0) -> list[str]:
    """Inference-rule layout: premises stacked above the line, conclusion below."""
    pad = "  " * indent
    lines: list[str] = []
    for child in pt.children:
        lines.extend(render_proof_tree(child, ops, indent + 1))
    conclusion = _judgment_text(pt)
    lines.append(pad + "-" * len(conclusion) + f"  [{_rule_text(pt, ops)}]")
    lines.append(pad + conclusion)
    return lines


def _cmd_solve(args: argparse.Namespace) -> int:
    model = _load(args.model)
    tree = _solve_model(model)
    reduced = closure(model.csp.full_env(), tree.local_ops).env
    print("reduced domains:", reduced.describe())
    sols = sorted(solutions(tree), key=lambda t: tuple(t[v] for v in model.csp.variables))
    for t in sols:
        print("solution:", " ".join(f"{v}={t[v]}" for v in model.csp.variables))
    if not sols:
        print("no solution")
    failures = sum(1 for leaf in tree.leaves if leaf.status is LeafStatus.FAILURE)
    print(f"branches: {len(tree.leaves)}, failures: {failures}")
    all_failed = failures == len(tree.leaves)
    return 1 if all_failed else 0


def _cmd_explain(args: argparse.Namespace) -> int:
    model = _load(args.model)
    tree = _solve_model(model)
    store = ExplanationStore.build(tree)
    pt = store.explain(DomainElement(args.var, args.value))
    if pt is None:
        print(f"({args.var},{args.value}) not removed in any branch")
        return 0
    print(f"context: {{{','.join(sorted(pt.judgment.context))}}}")
    for line in render_proof_tree(pt, tree.operators_by_id()):
        print(line)
    return 0


def _cmd_failure(args: argparse.Namespace) -> int:
    model = _load(args.model)
    tree = _solve_model(model)
    leaf = tree.node(args.branch)
    if not leaf.is_leaf() or leaf.status is not LeafStatus.FAILURE:
        raise UsageError(f"branch {args.branch!r} is not a failure leaf")
    var = args.var or leaf.env.empty_vars()[0]
    store = ExplanationStore.build(tree)
    trees = store.failure_explanation(args.branch, var)
    print(f"failure of {var} on branch {args.branch}: {len(trees)} explanations")
    ops = tree.operators_by_id()
    for pt in trees:
        for line in render_proof_tree(pt, ops):
            print(line)
        print()
    return 0


def _cmd_retract(args: argparse.Namespace) -> int:
    model = _load(args.model)
    state = SolverState.from_root(model.csp)
    repaired = retract(state, args.constraint)
    ok = verify_retraction(state, args.constraint)
    print("repaired domains:", repaired.env.describe())
    print(f"verified: {'true' if ok else 'false'}")
    return 0 if ok else 1


def _cmd_export(args: argparse.Namespace) -> int:
    model = _load(args.model)
    tree = _solve_model(model)
    store = ExplanationStore.build(tree)
    text = bundle_json(export_bundle(tree, store))
    Path(args.output).write_text(text, encoding="utf-8")
    print(f"wrote {args.output}")
    return 0


def _cmd_check(args: argparse.Namespace) -> int:
    model = _load(args.model)
    csp = model.csp
    tree = _solve_model(model)
    store = ExplanationStore.build(tree)
    ops = tree.operators_by_id()
    results: list[tuple[str, bool]] = []

    oracle_closure = closure_bruteforce(csp.full_env(), tree.local_ops)
    results.append(("closure matches full-sweep oracle", closure(csp.full_env(), tree.local_ops).env == oracle_closure))
    results.append(("search tree is complete", is_complete(tree)))
    if all(len(csp.domain.of(v)) == 1 or v in tree.label_vars for v in csp.variables) or \
            all(leaf.status is not LeafStatus.EXHAUSTED for leaf in tree.leaves):
        results.append(("solutions match brute force", solutions(tree) == solutions_bruteforce(csp)))
    results.append((
        "every explanation verifies",
        all(verify_proof_tree(store.explain(el), csp, ops) for el in store.removed_elements()),
    ))
    state = SolverState.from_root(csp)
    results.append((
        "retraction matches from-scratch solving",
        all(verify_retraction(state, c.id) for c in csp.constraints),
    ))

    ok = True
    for name, passed in results:
        print(f"{'PASS' if passed else 'FAIL'}: {name}")
        ok = ok and passed
    return 0 if ok else 1


def _cmd_import_check(args: argparse.Namespace) -> int:
    import_bundle(Path(args.bundle).read_text(encoding="utf-8"))
    print("bundle ok")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fdexplain", description=__doc__)
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("solve", help="solve a model and print solutions plus reduced domains")
    p.add_argument("model")
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("explain", help="print the withdrawal explanation of one (variable,value)")
    p.add_argument("model")
    p.add_argument("--var", required=True)
    p.add_argument("--value", required=True, type=int)
    p.set_defaults(fn=_cmd_explain)

    p = sub.add_parser("failure", help="print the failure explanation set of a failed branch")
    p.add_argument("model")
    p.add_argument("--branch", required=True)
    p.add_argument("--var")
    p.set_defaults(fn=_cmd_failure)

    p = sub.add_parser("retract", help="retract a constraint and verify the repaired domains")
    p.add_argument("model")
    p.add_argument("--constraint", required=True)
    p.set_defaults(fn=_cmd_retract)

    p = sub.add_parser("export", help="export the solve as a JSON bundle")
    p.add_argument("model")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=_cmd_export)

    p = sub.add_parser("check", help="run the instance-level oracle checks")
    p.add_argument("model")
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("validate-bundle", help="validate an exported bundle file")
    p.add_argument("bundle")
    p.set_defaults(fn=_cmd_import_check)

    return parser


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
