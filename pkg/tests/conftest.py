import os
import pathlib

import hypothesis
import pytest

from fdexplain.explanations import ExplanationStore
from fdexplain.model_io import parse_model
from fdexplain.search import solve

hypothesis.settings.register_profile(
    "default", deadline=None, max_examples=40, derandomize=True
)
hypothesis.settings.register_profile(
    "soak", deadline=None, max_examples=300, derandomize=False
)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DATA = pathlib.Path(__file__).parent / "data"
MODELS = pathlib.Path(__file__).parent.parent / "models"


@pytest.fixture(scope="session")
def conference_text():
    return (MODELS / "conf.model").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def conference(conference_text):
    return parse_model(conference_text)


@pytest.fixture(scope="session")
def conference_tree(conference):
    return solve(conference.csp, [v for v, _ in conference.labels], dict(conference.labels))


@pytest.fixture(scope="session")
def conference_store(conference_tree):
    return ExplanationStore.build(conference_tree)
