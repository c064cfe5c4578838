import functools

import pytest

from tilerec.generators import make_provider


@functools.lru_cache(maxsize=None)
def provider(kind: str, **_):
    return make_provider({"kind": kind})


@pytest.fixture(scope="session")
def lattice():
    return provider("lattice")


@pytest.fixture(scope="session")
def penrose_p():
    return provider("penrose")


@pytest.fixture(scope="session")
def pinwheel_p():
    return provider("pinwheel")


@pytest.fixture(scope="session")
def shear_p():
    return provider("shear")


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
