import pytest


class AcceptanceLog:
    def __init__(self):
        self.lines = {}

    def record(self, number: int, ok: bool, detail: str):
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        self.lines[number] = line
        print(line)


def pytest_configure(config):
    config._acceptance_log = AcceptanceLog()


@pytest.fixture(scope="session")
def acceptance(request):
    return request.config._acceptance_log


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = getattr(config, "_acceptance_log", None)
    if log is None or not log.lines:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(log.lines):
        terminalreporter.write_line(log.lines[k])
