import pathlib

import pytest

REPO = pathlib.Path(__file__).resolve().parents[2]
PRIMARY_DATA = REPO / "src" / "bayeshead" / "datasets"
SHARED_FIXTURES = REPO / "tests" / "fixtures"


@pytest.fixture
def toy_qa_path():
    return PRIMARY_DATA / "toy_qa.jsonl"


@pytest.fixture
def five_option_path():
    return SHARED_FIXTURES / "reduce_records.jsonl"
