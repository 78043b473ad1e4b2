import pytest
from pathlib import Path

from faultline.corpus import ingest
from faultline.llm import MockProvider
from faultline.reports import load_reports

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def feature_bundle():
    bundle, _ = ingest(FIXTURES / "feature_src", "compress", "1.0")
    return bundle


@pytest.fixture(scope="session")
def demo_bundle():
    bundle, _ = ingest(FIXTURES / "demo_src", "demo", "1.0")
    return bundle


@pytest.fixture(scope="session")
def demo_reports():
    return load_reports(FIXTURES / "reports.jsonl")


@pytest.fixture()
def mock_provider():
    return MockProvider.from_fixture(FIXTURES / "mock_replies.json")


@pytest.fixture(scope="session")
def demo_prepared(demo_bundle, demo_reports):
    from faultline.evaluate import prepare_reports

    provider = MockProvider.from_fixture(FIXTURES / "mock_replies.json")
    prepared, excluded = prepare_reports(
        demo_reports, {("demo", "1.0"): demo_bundle}, provider)
    assert excluded == []
    return prepared


@pytest.fixture(scope="session")
def demo_model(demo_prepared):
    from faultline.evaluate import train_from_prepared

    return train_from_prepared(demo_prepared)
