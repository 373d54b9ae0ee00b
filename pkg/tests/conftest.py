import pytest

from planarlab import _backend, solvers

ACCEPTANCE_LINES = []


def backend_params():
    params = [pytest.param(_backend.python_kernels, id="python")]
    if _backend.compiled_kernels is not None:
        params.insert(0, pytest.param(_backend.compiled_kernels, id="cython"))
    return params


@pytest.fixture(params=backend_params())
def backend(request, monkeypatch):
    """Run the test once per available kernel backend."""
    monkeypatch.setattr(solvers, "kernels", request.param)
    return request.param


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance_report():
    """Record one pass/fail line; shown live and again in the terminal summary."""

    def record(line):
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record
