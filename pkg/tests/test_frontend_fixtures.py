"""The viewer's checked-in fixtures must match fresh engine output exactly."""

import json
import pathlib

import pytest

from fdexplain.bundle import bundle_json, export_bundle
from fdexplain.csp import DomainElement
from fdexplain.diagnosis import Verdict, answer, start_session, transcript_payload

FIXTURES = pathlib.Path(__file__).parent.parent / "frontend" / "tests" / "fixtures"
SCENARIOS = ("blame_constraint", "symptom_not_confirmed", "blame_labeling")


def canonical(payload):
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def test_bundle_fixture_current(conference_tree, conference_store):
    expected = bundle_json(export_bundle(conference_tree, conference_store))
    on_disk = (FIXTURES / "conference.bundle.json").read_text(encoding="utf-8")
    assert on_disk == expected


@pytest.mark.parametrize("name", SCENARIOS)
def test_transcript_fixture_current(name, conference_tree, conference_store):
    scenario = json.loads((FIXTURES / f"{name}.json").read_text(encoding="utf-8"))
    pt = conference_store.explain(DomainElement("MP", 2))
    session = start_session(pt, conference_tree.csp, conference_tree.operators_by_id())
    for step in scenario["answers"]:
        assert session.cursor == step["node"]
        answer(session, step["node"], Verdict(step["verdict"]))
    assert session.concluded
    assert canonical(transcript_payload(session)) == scenario["transcript"]
