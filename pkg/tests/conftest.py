import time

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# criterion number -> (title, passed, detail); filled by the ``criterion`` fixture
ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


class Criterion:
    def __init__(self):
        self.start = time.perf_counter()

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self.start

    def record(self, number: int, title: str, checks: dict[str, bool], detail: str = "") -> None:
        """Record and print a verdict, then fail the test if any named check failed."""
        ok = all(checks.values())
        failed = [name for name, good in checks.items() if not good]
        note = detail + (f" | failed: {', '.join(failed)}" if failed else "")
        ACCEPTANCE[number] = (title, ok, note)
        print(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({self.elapsed:.1f} s) {note}")
        assert ok, f"criterion {number} failed: {note}"


@pytest.fixture
def criterion():
    return Criterion()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok, note = ACCEPTANCE[number]
        tr.write_line(f"{number:>2}  {'PASS' if ok else 'FAIL'}  {title}  {note}")
    passed = sum(ok for _, ok, _ in ACCEPTANCE.values())
    tr.write_line(f"{passed}/{len(ACCEPTANCE)} acceptance criteria passed")
