import functools

import pytest

from twcat.generate import Generator
from twcat.textio import builtin

EXAMPLES = ("e1", "e2", "e3")

# criterion label -> "PASS"/"FAIL", filled by test_acceptance
ACCEPTANCE: dict = {}


@functools.lru_cache(maxsize=None)
def workspace(name: str):
    return builtin(name)


@pytest.fixture(params=EXAMPLES)
def ws(request):
    return workspace(request.param)


@pytest.fixture
def e3():
    return workspace("e3")


@pytest.fixture
def gen(ws):
    return Generator(ws, seed=1234)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(ACCEPTANCE, key=lambda s: int(s.split(".")[0])):
        terminalreporter.write_line(f"{ACCEPTANCE[label]}  {label}")
