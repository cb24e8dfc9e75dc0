import pytest

from robinlap._backend import available_backends

_ACCEPTANCE = {}


@pytest.fixture(params=sorted(available_backends()))
def kernels(request):
    """Each available kernel backend in turn."""
    return available_backends()[request.param]


@pytest.fixture
def criterion():
    """Record an acceptance line, then assert it."""
    def record(number, label, ok, detail=""):
        _ACCEPTANCE[number] = (label, bool(ok), detail)
        assert ok, f"criterion {number} ({label}) failed: {detail}"
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        label, ok, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:2d}  {label}: {detail}")
