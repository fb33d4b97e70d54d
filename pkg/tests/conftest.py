from __future__ import annotations

import pytest

ACCEPTANCE = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = {}


@pytest.fixture
def acceptance_record(request):
    """Callable storing (criterion number, passed, detail) for the terminal summary."""
    store = request.config.stash[ACCEPTANCE]

    def record(n: int, passed: bool, detail: str = "") -> None:
        store[n] = (passed, detail)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.stash.get(ACCEPTANCE, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(store):
        passed, detail = store[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if passed else 'FAIL'}" + (f"  ({detail})" if detail else ""))
