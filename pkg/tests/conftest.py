import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "lab", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("lab")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def rel_err(X, Y):
    X, Y = np.asarray(X), np.asarray(Y)
    scale = max(np.linalg.norm(X, 2), np.linalg.norm(Y, 2), 1e-300)
    return np.linalg.norm(X - Y, 2) / scale


ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def criterion(request):
    """Record ``(passed, detail)`` for an acceptance criterion; the summary prints one line each."""
    def record(label, passed, detail=""):
        ACCEPTANCE[label] = (bool(passed), detail)
        print(f"[{'PASS' if passed else 'FAIL'}] {label}: {detail}")
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[label]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}  {detail}")
