import pytest

from teamlogic.semantics import PropContext


@pytest.fixture
def pq():
    return PropContext(("p", "q"))


@pytest.fixture
def p_only():
    return PropContext(("p",))


_ACCEPTANCE: list = []


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
