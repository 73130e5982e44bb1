import numpy as np
import pytest

from scaled_fields import TaggedCoordinate, UniverseTag


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


@pytest.fixture
def tag0():
    return UniverseTag((0.0,))


@pytest.fixture
def tag1():
    return UniverseTag((1.0,))


def coord(tag, *u):
    return TaggedCoordinate(tag, tuple(u))


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_line():
    """Record one PASS/FAIL line for the acceptance summary."""

    def record(number: int, title: str, ok: bool, detail: str) -> bool:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2} {title}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
