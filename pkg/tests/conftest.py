import pytest

from relbn import datasets


@pytest.fixture(scope="session")
def table1():
    return datasets.example1_relation()


@pytest.fixture(scope="session")
def deps1():
    return datasets.example1_dependencies()


@pytest.fixture(scope="session")
def table3():
    return datasets.example2_relation()


@pytest.fixture(scope="session")
def deps3():
    return datasets.example2_dependencies()


@pytest.fixture(scope="session")
def data_dir():
    return datasets.data_path("")


# -- acceptance reporting ---------------------------------------------------

_criteria: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion covered by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (report.when != "call" and report.passed):
        return
    number, text = mark.args
    status = "PASS" if report.passed else "SKIP" if report.skipped else "FAIL"
    # a criterion fails if any of its phases or parts fails
    if _criteria.get(number, ("PASS",))[0] == "PASS":
        _criteria[number] = (status, text)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        status, text = _criteria[number]
        terminalreporter.write_line(f"{status} criterion {number}: {text}")
