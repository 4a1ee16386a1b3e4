import pytest

_VERDICTS: dict[int, str] = {}


class Criterion:
    def __init__(self, number: int, title: str):
        self.number = number
        self.title = title
        self.checks: list[tuple[str, bool]] = []
        self.finished = False

    def check(self, label: str, passed) -> bool:
        self.checks.append((label, bool(passed)))
        return bool(passed)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(ok for _, ok in self.checks)

    def line(self, note: str = "") -> str:
        status = "PASS" if self.passed and not note else "FAIL"
        body = "; ".join(f"{label}{'' if ok else ' [x]'}" for label, ok in self.checks)
        return f"{status}  criterion {self.number:2d}  {self.title}: {body}{note}"

    def finish(self):
        self.finished = True
        _VERDICTS[self.number] = self.line()
        print(_VERDICTS[self.number])
        failed = [label for label, ok in self.checks if not ok]
        assert not failed, f"criterion {self.number} failed: {failed}"


@pytest.fixture
def criterion():
    made = []

    def factory(number, title):
        c = Criterion(number, title)
        made.append(c)
        return c

    yield factory
    for c in made:
        if not c.finished:
            _VERDICTS[c.number] = c.line(" (aborted before all checks ran)")
            print(_VERDICTS[c.number])


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_VERDICTS):
        terminalreporter.write_line(_VERDICTS[number])
