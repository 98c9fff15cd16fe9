import numpy as np
import pytest

from adiabatic_pathways import hamiltonians, schedules


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def lz():
    return hamiltonians.landau_zener()


@pytest.fixture
def frozen_lz_schedule():
    # u1 = 1, u2 = 0 throughout; deliberately ignores the end-point pins
    return schedules.Schedule(np.ones(101), np.zeros(101))


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for the terminal summary, then assert."""

    def _verdict(name: str, ok: bool, detail: str) -> None:
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        assert ok, detail

    return _verdict


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
