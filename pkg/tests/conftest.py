import pytest

from qlambda.gamma import parse_spec

REFERENCE_SPECS = {
    "half": "rat:1/2",
    "third": "rat:1/3",
    "two_thirds": "rat:2/3",
    "golden": "alg:x^2+x-1;root=[1/2,2/3]",
    "sqrt2": "sqrt:2",
    "trans": "trans:approx=39/100;eps=1/1000",
}


@pytest.fixture(params=["half", "third", "two_thirds", "golden", "sqrt2"])
def exact_spec(request):
    """Specs for which every sign is decidable."""
    return parse_spec(REFERENCE_SPECS[request.param])


@pytest.fixture
def golden():
    return parse_spec(REFERENCE_SPECS["golden"])


@pytest.fixture
def trans():
    return parse_spec(REFERENCE_SPECS["trans"])


# One line per acceptance criterion, filled in by test_acceptance.py and
# printed in the terminal summary so it shows up even when output is captured.
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
