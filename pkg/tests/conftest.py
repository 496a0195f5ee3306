import pytest

from kss import InitConditions, Window, expand, fit_params


@pytest.fixture(scope="session")
def worked_cond():
    return InitConditions(n_bar=45, l3_target=30, delta_l3=2.5)


@pytest.fixture(scope="session")
def worked_state(worked_cond):
    return fit_params(worked_cond)


@pytest.fixture(scope="session")
def narrow_table(worked_state):
    return expand(worked_state, Window.narrow(45, 30))


@pytest.fixture(scope="session")
def wide_table(worked_state):
    # +-10 in n, l and m around the packet centre
    return expand(worked_state, Window.symmetric(45, 30))


ACCEPTANCE = {}


@pytest.fixture
def criterion():
    """Record one summary line per acceptance criterion."""

    def record(number, passed, detail):
        label = f"CRITERION {number}" if isinstance(number, int) else number
        line = f"{label}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE[number] = line
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE, key=str):
            terminalreporter.write_line(ACCEPTANCE[k])
