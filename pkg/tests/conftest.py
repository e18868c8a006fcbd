import pytest

# criterion number -> list of (sub-check, passed, detail); filled by the
# acceptance tests and printed at the end of the run
ACCEPTANCE: dict[int, list[tuple[str, bool, str]]] = {}


@pytest.fixture
def record():
    def _record(criterion: int, name: str, passed: bool, detail: str = "") -> bool:
        ACCEPTANCE.setdefault(criterion, []).append((name, passed, detail))
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for criterion in sorted(ACCEPTANCE):
        checks = ACCEPTANCE[criterion]
        ok = all(passed for _, passed, _ in checks)
        failed = [name for name, passed, _ in checks if not passed]
        summary = f"{len(checks)} checks" if ok else "failed: " + "; ".join(failed)
        tr.write_line(f"criterion {criterion:>2}: {'PASS' if ok else 'FAIL'}  ({summary})")
        for name, passed, detail in checks:
            if not passed or detail:
                tr.write_line(f"    {'ok  ' if passed else 'FAIL'} {name}" + (f": {detail}" if detail else ""))
