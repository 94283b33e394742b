#!/usr/bin/env python3
"""End-to-end walkthrough on the conference scheduling model.

Prints the propagated domains, the labeling tree, the explanation of a
withdrawal, a failure explanation, and a constraint retraction.
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from fdexplain.cli import render_proof_tree
from fdexplain.csp import DomainElement
from fdexplain.explanations import ExplanationStore
from fdexplain.model_io import parse_model
from fdexplain.operators import local_operators
from fdexplain.propagation import closure
from fdexplain.retraction import SolverState, retract, verify_retraction
from fdexplain.search import solve

MODEL = pathlib.Path(__file__).resolve().parent.parent / "models" / "conf.model"


def main() -> None:
    model = parse_model(MODEL.read_text(encoding="utf-8"))
    csp = model.csp

    print("== propagation only ==")
    reduced = closure(csp.full_env(), local_operators(csp))
    print(f"reduced domains: {reduced.env.describe()}  ({reduced.steps} operator applications)")

    print("\n== labeling PM ==")
    tree = solve(csp, [v for v, _ in model.labels], dict(model.labels))
    for leaf in tree.leaves:
        detail = leaf.solution.binding if leaf.solution else leaf.env.describe()
        print(f"branch {leaf.branch_id}: {leaf.status.value} {detail}")

    print("\n== why is (MP,2) gone? ==")
    store = ExplanationStore.build(tree)
    ops = tree.operators_by_id()
    for line in render_proof_tree(store.explain(DomainElement("MP", 2)), ops):
        print(line)

    print("\n== why does PM=3 fail? (MA side) ==")
    for pt in store.failure_explanation("PM=3", "MA"):
        for line in render_proof_tree(pt, ops):
            print(line)
        print()

    print("== retract MA > PM at the root ==")
    state = SolverState.from_root(csp)
    repaired = retract(state, "c2")
    print(f"repaired domains: {repaired.env.describe()}")
    print(f"verified against from-scratch solving: {verify_retraction(state, 'c2')}")


if __name__ == "__main__":
    main()
