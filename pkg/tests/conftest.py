import numpy as np
import pytest

from modinv.numerics import Tolerance


@pytest.fixture
def tol():
    return Tolerance(1e-9)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    import sys

    for name, mod in list(sys.modules.items()):
        if name.endswith("test_acceptance") and getattr(mod, "RESULTS", None):
            terminalreporter.section("acceptance criteria")
            for n in sorted(mod.RESULTS):
                terminalreporter.write_line(mod.RESULTS[n])
