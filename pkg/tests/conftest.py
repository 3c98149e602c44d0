import pytest

from wifn import DATA
from wifn.context import load_context_file
from wifn.roles import generalize, load_narration_file, load_roles_file, message_space


@pytest.fixture(scope="session")
def nsl_ctx():
    return load_context_file(DATA / "nsl.ctx")


@pytest.fixture(scope="session")
def woolam_ctx():
    return load_context_file(DATA / "woolam.ctx")


@pytest.fixture(scope="session")
def example_ctx():
    return load_context_file(DATA / "selection_example.ctx")


@pytest.fixture(scope="session")
def nsl_roles():
    return load_roles_file(DATA / "nsl.roles")


@pytest.fixture(scope="session")
def nsl_space(nsl_roles, nsl_ctx):
    return message_space(nsl_roles, nsl_ctx)


@pytest.fixture(scope="session")
def woolam_amended_roles(woolam_ctx):
    return generalize(load_narration_file(DATA / "woolam_amended.proto"), woolam_ctx)


@pytest.fixture(scope="session")
def woolam_flawed_roles(woolam_ctx):
    return generalize(load_narration_file(DATA / "woolam_flawed.proto"), woolam_ctx)


# Acceptance bookkeeping: property outcomes feed criterion 7, and a summary
# line per criterion is printed at the end of the run.

OUTCOMES = pytest.StashKey[dict]()
_SESSION_CONFIG: list = []


def pytest_configure(config):
    config.stash[OUTCOMES] = {}
    _SESSION_CONFIG[:] = [config]


def pytest_collection_modifyitems(config, items):
    items.sort(key=lambda item: item.path.name == "test_acceptance.py")


def pytest_runtest_logreport(report):
    if not _SESSION_CONFIG:
        return
    outcomes = _SESSION_CONFIG[0].stash[OUTCOMES]
    if report.when == "call" or not report.passed:
        outcomes[report.nodeid] = outcomes.get(report.nodeid, True) and report.passed


@pytest.fixture
def outcomes(request):
    return request.config.stash[OUTCOMES]


def pytest_terminal_summary(terminalreporter, config):
    rows = sorted((k, v) for k, v in config.stash[OUTCOMES].items() if "::test_criterion_" in k)
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, passed in rows:
        number, _, label = nodeid.split("::test_criterion_", 1)[1].partition("_")
        terminalreporter.write_line(f"criterion {number} ({label}): {'PASS' if passed else 'FAIL'}")
