import pytest

from autopfmea.datasets import load_roll_example


@pytest.fixture(scope="session")
def roll():
    return load_roll_example()


def pytest_terminal_summary(terminalreporter):
    results = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when == "call" and "test_acceptance.py" in rep.nodeid:
                results.append((rep.nodeid.split("::")[-1], outcome))
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(results):
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
