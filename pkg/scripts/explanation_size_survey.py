#!/usr/bin/env python3
"""Survey explanation tree sizes across random instances.

Tree width tracks how many supports each pruning loses (wide for
inequalities, narrow for equalities); height tracks propagation depth.
Usage: explanation_size_survey.py [seed] [instances]
"""

import pathlib
import random
import statistics
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from fdexplain.corpus import random_csp
from fdexplain.explanations import ExplanationStore
from fdexplain.search import solve


def main() -> None:
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else 2026
    instances = int(sys.argv[2]) if len(sys.argv) > 2 else 50
    rng = random.Random(seed)

    rows = []
    for _ in range(instances):
        csp = random_csp(rng, max_vars=4, max_values=4, max_constraints=5)
        tree = solve(csp, csp.variables[:2])
        store = ExplanationStore.build(tree)
        for element in store.removed_elements():
            pt = store.explain(element)
            rows.append((pt.size(), pt.height(), max(len(n.children) for _, n in pt.walk())))

    if not rows:
        print("no removals sampled; try another seed")
        return
    sizes, heights, widths = zip(*rows)
    print(f"instances: {instances}   explanations: {len(rows)}")
    for name, values in (("size", sizes), ("height", heights), ("max branching", widths)):
        print(
            f"{name:>13}: mean {statistics.mean(values):5.2f}   "
            f"median {statistics.median(values):4.1f}   max {max(values)}"
        )


if __name__ == "__main__":
    main()
