import pytest

from mclsearch import cliques, graphcore, search


@pytest.fixture(scope="session")
def graph():
    return graphcore.mclaughlin_graph()


@pytest.fixture(scope="session")
def idx():
    return cliques.mclaughlin_lines()


@pytest.fixture(scope="session")
def G():
    return search.group_chain()


@pytest.fixture(scope="session")
def U():
    return search.apex_group(1)


def pytest_terminal_summary(terminalreporter):
    from tests import test_acceptance
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
