from __future__ import annotations

import pytest

from hurwitz_tr.suite import BUILTIN_CURVES, curve_from_text

_AC_LINES: list = []


@pytest.fixture(scope="session")
def airy():
    return curve_from_text(BUILTIN_CURVES["airy"])


@pytest.fixture(scope="session")
def zinv():
    return curve_from_text(BUILTIN_CURVES["zinv"])


@pytest.fixture(scope="session")
def cubic():
    return curve_from_text(BUILTIN_CURVES["cubic"])


@pytest.fixture(scope="session", params=["airy", "zinv", "cubic"])
def any_curve(request):
    return curve_from_text(BUILTIN_CURVES[request.param])


@pytest.fixture
def ac_record():
    """Call with (label, passed, note); lines are echoed in the terminal summary."""
    def record(label: str, passed: bool, note: str = ""):
        line = "%s %s%s" % (label, "PASS" if passed else "FAIL", "  " + note if note else "")
        _AC_LINES.append(line)
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not _AC_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_AC_LINES, key=lambda s: int(s.split()[0][2:])):
        terminalreporter.write_line(line)
