"""Shared test plumbing: acceptance-criterion reporting."""

ACCEPTANCE = []


def record(num: int, ok: bool, detail: str) -> None:
    """Register one acceptance-criterion outcome for the final summary."""
    ACCEPTANCE.append((num, ok, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(
            "CRITERION %2d: %s - %s" % (num, "PASS" if ok else "FAIL", detail))
