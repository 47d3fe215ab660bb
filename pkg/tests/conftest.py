"""Print one line per acceptance criterion at the end of the run."""

from support import CRITERION_RESULTS


def pytest_terminal_summary(terminalreporter):
    if not CRITERION_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in CRITERION_RESULTS:
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{label}: {status} - {detail}")
