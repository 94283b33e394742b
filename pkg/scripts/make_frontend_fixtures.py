#!/usr/bin/env python3
"""Regenerate the browser viewer's test fixtures from the engine.

Writes the conference bundle plus three golden diagnosis scenarios whose
transcripts the viewer must reproduce byte for byte.
"""

import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from fdexplain.bundle import bundle_json, export_bundle
from fdexplain.csp import DomainElement
from fdexplain.diagnosis import Verdict, answer, start_session, transcript_payload
from fdexplain.explanations import ExplanationStore
from fdexplain.model_io import parse_model
from fdexplain.search import solve

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "frontend" / "tests" / "fixtures"

SCENARIOS = {
    "blame_constraint": [
        ("0", "INCORRECT"),
        ("0.0", "CORRECT"),
        ("0.1", "INCORRECT"),
        ("0.2", "CORRECT"),
        ("0.1.0", "CORRECT"),
    ],
    "symptom_not_confirmed": [
        ("0", "CORRECT"),
    ],
    "blame_labeling": [
        ("0", "INCORRECT"),
        ("0.0", "INCORRECT"),
        ("0.1", "CORRECT"),
        ("0.2", "CORRECT"),
        ("0.0.0", "INCORRECT"),
        ("0.0.0.0", "INCORRECT"),
    ],
}


def canonical(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def main() -> None:
    model = parse_model((ROOT / "models" / "conf.model").read_text(encoding="utf-8"))
    tree = solve(model.csp, [v for v, _ in model.labels], dict(model.labels))
    store = ExplanationStore.build(tree)
    FIXTURES.mkdir(parents=True, exist_ok=True)
    (FIXTURES / "conference.bundle.json").write_text(
        bundle_json(export_bundle(tree, store)), encoding="utf-8"
    )

    pt = store.explain(DomainElement("MP", 2))
    ops = tree.operators_by_id()
    for name, answers in SCENARIOS.items():
        session = start_session(pt, tree.csp, ops)
        for node_id, verdict in answers:
            assert session.cursor == node_id, (name, session.cursor, node_id)
            answer(session, node_id, Verdict(verdict))
        assert session.concluded, name
        scenario = {
            "answers": [{"node": n, "verdict": v} for n, v in answers],
            "element": {"value": 2, "var": "MP"},
            "transcript": canonical(transcript_payload(session)),
        }
        (FIXTURES / f"{name}.json").write_text(
            json.dumps(scenario, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
        print(f"{name}: {transcript_payload(session)['outcome']}")

    print(f"fixtures written to {FIXTURES}")


if __name__ == "__main__":
    main()
