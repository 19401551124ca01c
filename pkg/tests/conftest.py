from acceptance_report import lines


def pytest_terminal_summary(terminalreporter):
    out = lines()
    if out:
        terminalreporter.section("acceptance criteria")
        for line in out:
            terminalreporter.write_line(line)
