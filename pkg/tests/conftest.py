import _criteria


def pytest_terminal_summary(terminalreporter):
    lines = _criteria.report_lines()
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
