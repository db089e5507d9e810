import pytest

_acceptance_lines = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(label): exit criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        measured = "; ".join(f"{k}={v}" for k, v in report.user_properties)
        status = "PASS" if report.passed else "FAIL"
        _acceptance_lines.append(f"{status}  {marker.args[0]}" + (f"  [{measured}]" if measured else ""))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in _acceptance_lines:
        terminalreporter.write_line(line)
