import pytest
from hypothesis import HealthCheck, settings

from herzlab.spectral import FrequencyGrid

settings.register_profile(
    "herzlab",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("herzlab")


@pytest.fixture(scope="session")
def grid4():
    return FrequencyGrid(4, 0.5)


@pytest.fixture(scope="session")
def grid8():
    return FrequencyGrid(8, 0.25)


def random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion; the lines are printed
    in the terminal summary and echoed immediately."""

    def record(number: int, ok: bool, title: str, detail: str) -> bool:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} | {detail}"
        ACCEPTANCE_LINES[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
