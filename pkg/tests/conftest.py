import numpy as np
import pytest

from twomode import PulseEnvelope, SystemParams


@pytest.fixture
def params():
    return SystemParams(0.5, 0.5, 0.0)


@pytest.fixture
def rising():
    return PulseEnvelope("rising-exponential", 1.0)


@pytest.fixture
def rect2():
    return PulseEnvelope("rectangular", 2.0)


def sup_norm(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


# --- acceptance report -----------------------------------------------------

ACCEPTANCE = {}


class record:
    """Context manager marking one acceptance criterion PASS or FAIL."""

    def __init__(self, number: int, title: str):
        self.number, self.title = number, title
        self.details = []

    def note(self, text: str):
        self.details.append(text)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        status = "PASS" if exc_type is None else "FAIL"
        detail = "; ".join(self.details)
        if exc_type is not None and exc is not None:
            detail = f"{detail}; {str(exc).splitlines()[0] if str(exc) else exc_type.__name__}".lstrip("; ")
        ACCEPTANCE[self.number] = (status, self.title, detail)
        return False


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        status, title, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {status} - {title}" + (f" [{detail}]" if detail else ""))
