"""Collects the acceptance PASS/FAIL lines and prints them after the run."""

ACCEPTANCE = []


def report(number: int, ok: bool, detail: str):
    line = f"CRITERION {number}: {'PASS' if ok else 'FAIL'} | {detail}"
    ACCEPTANCE.append((number, line))
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE):
        terminalreporter.write_line(line)
