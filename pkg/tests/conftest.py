import numpy as np
import pytest

from bkmod.coeffs import CoeffParams
from bkmod.series import EisensteinP, series_ring


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def setup(p=2, r=1, N=6, M=64, P=None):
    """Coefficient params, Eisenstein polynomial (default u + p) and series ring."""
    params = CoeffParams(p, r, N)
    P = EisensteinP(params, P if P is not None else [p, 1])
    return params, P, series_ring(params, M)


ACCEPTANCE = []


def record(number, ok, detail):
    """Remember a one-line verdict for an acceptance criterion."""
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
