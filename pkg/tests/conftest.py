import pytest

from quartlines.field import field_make
from quartlines.surface import load_surface


@pytest.fixture(scope="session")
def F13():
    return field_make(13)


@pytest.fixture(scope="session")
def F5():
    return field_make(5)


@pytest.fixture(scope="session")
def corpus():
    names = ["ex_39", "ex_triple31", "ex_q4_20", "ex_doubleline27", "fermat", "schur"]
    return {n: load_surface(f"{n}.quartic") for n in names}


VERDICTS = []


@pytest.fixture
def verdict():
    """Record and print one PASS/FAIL line for an acceptance criterion."""
    def record(number, ok, detail, seconds=None):
        timing = "" if seconds is None else f" [{seconds:.2f} s]"
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}{timing}"
        VERDICTS.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(VERDICTS, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
