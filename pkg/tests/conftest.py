import pytest

from mrcpsp_eda import _kernels
from mrcpsp_eda.model import generate_tiny_instance, reduce_instance


@pytest.fixture(params=sorted(_kernels.available_backends()))
def backend(request):
    return _kernels.available_backends()[request.param]


@pytest.fixture(scope="session")
def tiny_instances():
    return [generate_tiny_instance(seed) for seed in range(100)]


@pytest.fixture(scope="session")
def reduced_tiny(tiny_instances):
    return [reduce_instance(inst)[0] for inst in tiny_instances]


ACCEPTANCE_LINES = []


@pytest.fixture
def verdict(request):
    """Record one pass/fail line for an acceptance criterion, then assert it."""

    def record(label, ok, detail):
        line = f"{label}: {'PASS' if ok else 'FAIL'} - {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
