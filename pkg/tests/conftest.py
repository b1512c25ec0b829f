import sys

import pytest
from hypothesis import settings

from flatleaves.klein import build_klein

settings.register_profile("flatleaves", max_examples=200, derandomize=True, deadline=None)
settings.load_profile("flatleaves")


@pytest.fixture(scope="session")
def klein():
    cache = {}

    def get(n):
        if n not in cache:
            cache[n] = build_klein(n)
        return cache[n]

    return get


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.format_results():
        terminalreporter.write_line(line)
