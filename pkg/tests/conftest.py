import json
import sys
from pathlib import Path

import pytest

HERE = Path(__file__).resolve().parent
sys.path.insert(0, str(HERE))

_criteria: dict[int, tuple[str, str]] = {}


@pytest.fixture(scope="session")
def oracle():
    return json.loads((HERE / "oracle_data.json").read_text())


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    n = int(report.nodeid.split("test_criterion_")[1].split("_")[0])
    detail = dict(report.user_properties).get("detail", "")
    _criteria[n] = ("PASS" if report.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        status, detail = _criteria[n]
        terminalreporter.write_line(f"criterion {n}: {status} {detail}".rstrip())
