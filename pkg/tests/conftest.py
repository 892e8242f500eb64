import numpy as np
import pytest

from ladderlab.models import MODEL_NAMES, get_model
from ladderlab.operator_engine import interior_grid

DISCRETE_MODELS = ("MeixnerPollaczek", "ContinuousHahn", "ContinuousDualHahn", "Wilson", "AskeyWilson")
ORDINARY_MODELS = tuple(m for m in MODEL_NAMES if m not in DISCRETE_MODELS)


@pytest.fixture(params=MODEL_NAMES)
def any_model(request):
    return get_model(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def grid_for(spec, npts=50):
    return interior_grid(spec, npts)


# one line per acceptance criterion, repeated in the terminal summary so it
# shows up even when pytest captures output
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
