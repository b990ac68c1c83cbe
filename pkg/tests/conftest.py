import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from monomeq.linalg_kernel import ToleranceConfig  # noqa: E402


@pytest.fixture
def tol():
    return ToleranceConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def random_complex(rng, n, m=None):
    m = n if m is None else m
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


def random_hermitian(rng, n):
    Z = random_complex(rng, n)
    return Z + Z.conj().T


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.RESULTS:
        terminalreporter.write_line(line)
