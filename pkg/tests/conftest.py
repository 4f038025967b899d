import itertools
import warnings

import pytest
from hypothesis import settings, strategies as st

from hyperturan.field import SmallFieldWarning
from hyperturan.hypergraph import Hypergraph

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])


@pytest.fixture(autouse=True)
def _quiet_small_field():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SmallFieldWarning)
        yield


@st.composite
def hypergraphs(draw, k=2, min_n=1, max_n=6, max_edges=None):
    n = draw(st.integers(min_n, max_n))
    cand = list(itertools.combinations(range(n), k))
    if not cand:
        return Hypergraph(k, n)
    chosen = draw(st.lists(st.sampled_from(cand), unique=True,
                           max_size=len(cand) if max_edges is None else max_edges))
    return Hypergraph(k, n, tuple(chosen))
