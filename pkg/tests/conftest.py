import numpy as np
import pytest

from hilbert_iter.problems import make_problem


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def deriv2_400():
    return {v: make_problem(v, 400) for v in ("i", "ii", "iii")}


def random_spd(rng, n, cond=1e4):
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    w = np.logspace(0, np.log10(cond), n)
    M = (q * w) @ q.T
    return 0.5 * (M + M.T)
