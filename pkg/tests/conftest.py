import pytest

from molfuse.chem.prompts import SIDER_ADR_CATEGORIES
from molfuse.pipeline import generate_fixtures


@pytest.fixture(scope="session")
def fixtures_dir(tmp_path_factory):
    """Synthetic benchmark CSVs, generated once per test session."""
    out = tmp_path_factory.mktemp("fixtures")
    generate_fixtures(out, tuple(SIDER_ADR_CATEGORIES))
    return out


def pytest_runtest_logreport(report):
    # one visible pass/fail line per acceptance criterion
    if report.when == "call" and "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        outcome = "PASS" if report.passed else "FAIL"
        print(f"\n[PRIMARY] {name}: {outcome}", flush=True)
