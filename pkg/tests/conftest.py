import pathlib

import pytest

REPO = pathlib.Path(__file__).resolve().parent.parent


@pytest.fixture
def bell_registry_file():
    return REPO / "registries" / "bell.txt"


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): exit criterion")
    config._acceptance_results = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    rep = outcome.get_result()
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        number, title = marker.args
        item.config._acceptance_results[number] = (title, rep.passed)


def pytest_terminal_summary(terminalreporter, config):
    results = config._acceptance_results
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, passed = results[number]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {number:>2}. {title}")
