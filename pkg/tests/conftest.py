import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from causal_gambit import AgentContext, load_default_model  # noqa: E402
from causal_gambit.model import random_model  # noqa: E402


@pytest.fixture(scope="session")
def default_model():
    return load_default_model()


@pytest.fixture(scope="session")
def ctx(default_model):
    return AgentContext.for_model(default_model, "Treatment", "Lives", "lives")


@pytest.fixture
def make_random_model():
    def make(seed, n_vars=4, **kw):
        return random_model(np.random.default_rng(seed), n_vars, **kw)
    return make


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
