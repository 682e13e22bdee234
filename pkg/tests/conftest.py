import pytest

from ddca.experiments import sweep_cell_numbers, sweep_time_shifts
from ddca.scenario import generate_scenario, portscan_default, processes_of_interest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def seed1_spec():
    return portscan_default(1)


@pytest.fixture(scope="session")
def seed1_stream(seed1_spec):
    return generate_scenario(seed1_spec)


@pytest.fixture(scope="session")
def interest(seed1_spec):
    return processes_of_interest(seed1_spec)


@pytest.fixture(scope="session")
def cell_sweep(seed1_stream):
    return sweep_cell_numbers(seed1_stream)


@pytest.fixture(scope="session")
def shift_sweep(seed1_stream):
    return sweep_time_shifts(seed1_stream)


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion for the summary."""

    def record(number, name, ok, detail=""):
        status = "PASS" if ok else "FAIL"
        ACCEPTANCE_LINES.append(f"[{status}] AC{number:>2} {name}" + (f" -- {detail}" if detail else ""))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
