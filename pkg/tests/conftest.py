import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)

ACCEPTANCE_KEY = pytest.StashKey[list]()


class CriterionLog:
    """Collects one verdict line per acceptance criterion."""

    def __init__(self, lines: list, number: int, title: str):
        self.lines = lines
        self.number = number
        self.title = title
        self.recorded = False

    def record(self, ok: bool, detail: str) -> bool:
        verdict = "PASS" if ok else "FAIL"
        line = f"[{verdict}] criterion {self.number:>2} {self.title}: {detail}"
        self.lines.append((self.number, line))
        print(line)
        self.recorded = True
        return ok


@pytest.fixture
def criterion(request):
    lines = request.config.stash.setdefault(ACCEPTANCE_KEY, [])
    marker = request.node.get_closest_marker("criterion")
    number, title = marker.args
    log = CriterionLog(lines, number, title)
    yield log
    if not log.recorded:
        log.record(False, "check raised before producing a verdict")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion metadata")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(lines):
        terminalreporter.write_line(line)
