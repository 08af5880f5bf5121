"""The ``deriv2`` test problems and the noise model.

The integral operator has the Green's function of ``-d^2/ds^2`` on (0, 1)
with Dirichlet conditions as kernel,

    K(s, t) = s (1 - t)   for s <= t,
              t (1 - s)   for s >= t,

and is discretized by Galerkin projection onto the orthonormal
piecewise-constant basis ``h**-1/2 * 1_{cell_i}``, ``h = 1/m``.  With this
basis, Euclidean norms of coefficient vectors approximate L2 norms of the
functions they represent.

All cell integrals are evaluated in closed form.
"""

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionError, DomainError

__all__ = [
    "VARIANTS",
    "TestProblem",
    "NoisyData",
    "galerkin_deriv2",
    "exact_pair",
    "make_problem",
    "add_noise",
    "save_problem_csv",
    "load_problem_csv",
]

# maximal smoothness p0 of each solution w.r.t. the sine scale
VARIANTS = {"i": np.inf, "ii": 2.5, "iii": 0.5}


@dataclass(frozen=True, eq=False)
class TestProblem:
    __test__ = False  # keep pytest from collecting this class

    m: int
    A: np.ndarray
    y: np.ndarray
    x_true: np.ndarray
    variant: str
    a: float = 2.0
    m_link: float = np.pi**-2
    M_link: float = np.pi**-2

    @property
    def p0(self):
        return VARIANTS[self.variant]


@dataclass(frozen=True, eq=False)
class NoisyData:
    y_delta: np.ndarray
    delta: float
    sigma: float
    seed: int


def _edges(m):
    return np.arange(m + 1) / m


def galerkin_deriv2(m):
    """Galerkin matrix of the ``deriv2`` kernel, ``m`` x ``m``, symmetric."""
    m = int(m)
    if m < 2:
        raise DimensionError(f"need m >= 2, got {m}")
    h = 1.0 / m
    e = _edges(m)
    lo, hi = e[:-1], e[1:]
    int_s = 0.5 * (hi**2 - lo**2)      # integral of s over a cell
    int_1ms = h - int_s                # integral of (1 - s)
    i = np.arange(m)
    # row cell strictly left of column cell: s < t everywhere, K = s (1 - t)
    A = np.where(i[:, None] < i[None, :], np.outer(int_s, int_1ms), np.outer(int_1ms, int_s))
    # diagonal cell (a, b): twice the integral over the triangle s < t,
    # i.e. int_a^b (1 - t)(t^2 - a^2) dt
    a, b = lo, hi
    F = lambda t: t**3 / 3 - t**4 / 4 - a**2 * t + a**2 * t**2 / 2
    A[i, i] = F(b) - F(a)
    return A / h


# antiderivatives of (y, x_true) for each variant
_ANTIDERIVATIVES = {
    "i": (
        lambda s: -np.cos(2 * np.pi * s) / (8 * np.pi**3),
        lambda t: -np.cos(2 * np.pi * t) / (2 * np.pi),
    ),
    "ii": (
        lambda s: (s**2 / 2 - s**4 / 2 + s**5 / 5) / 3,
        lambda t: 2 * t**2 - 4 * t**3 / 3,
    ),
    "iii": (
        lambda s: (s**2 / 2 - s**4 / 4) / 6,
        lambda t: t**2 / 2,
    ),
}


def exact_pair(variant, m):
    """Coefficient vectors ``(y, x_true)`` of the exact data and solution.

    Variants:

    ========  ===========================  ==============
    ``i``     y = sin(2 pi s) / (4 pi^2)   x = sin(2 pi t)
    ``ii``    y = s (1 - 2s^2 + s^3) / 3   x = 4 t (1 - t)
    ``iii``   y = s (1 - s^2) / 6          x = t
    ========  ===========================  ==============
    """
    if variant not in _ANTIDERIVATIVES:
        raise DomainError(f"unknown variant {variant!r}; expected one of {sorted(VARIANTS)}")
    m = int(m)
    if m < 2:
        raise DimensionError(f"need m >= 2, got {m}")
    e = _edges(m)
    Y, X = _ANTIDERIVATIVES[variant]
    scale = np.sqrt(m)  # h**-1/2
    return np.diff(Y(e)) * scale, np.diff(X(e)) * scale


def make_problem(variant, m=400):
    y, x_true = exact_pair(variant, m)
    return TestProblem(m=int(m), A=galerkin_deriv2(m), y=y, x_true=x_true, variant=variant)


def add_noise(y, sigma, seed):
    """Perturb ``y`` by Gaussian noise of exact relative size ``sigma``.

    ``e`` is drawn from PCG64 seeded with ``seed`` (numpy's
    ``standard_normal``, ziggurat transform), then rescaled so that
    ``||y_delta - y|| = sigma ||y||``.
    """
    y = np.asarray(y, dtype=float)
    if sigma < 0:
        raise DomainError(f"noise level must be nonnegative, got {sigma}")
    if sigma == 0:
        return NoisyData(y_delta=y.copy(), delta=0.0, sigma=0.0, seed=int(seed))
    ynorm = np.linalg.norm(y)
    if ynorm == 0:
        raise DomainError("cannot scale relative noise for y = 0")
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    e = rng.standard_normal(y.shape[0])
    y_delta = y + sigma * (ynorm / np.linalg.norm(e)) * e
    return NoisyData(y_delta=y_delta, delta=float(sigma * ynorm), sigma=float(sigma), seed=int(seed))


def save_problem_csv(problem, directory, noisy=None):
    """Write ``A.csv`` (m rows of m values) and ``vectors.csv``.

    ``vectors.csv`` has header ``index,y,x_true`` plus ``y_delta`` when
    noisy data is given. Floats use shortest round-trip repr.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    with open(directory / "A.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        for row in problem.A:
            w.writerow([repr(float(v)) for v in row])
    cols = ["index", "y", "x_true"] + (["y_delta"] if noisy is not None else [])
    with open(directory / "vectors.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for k in range(problem.m):
            row = [k, repr(float(problem.y[k])), repr(float(problem.x_true[k]))]
            if noisy is not None:
                row.append(repr(float(noisy.y_delta[k])))
            w.writerow(row)
    with open(directory / "meta.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["variant", "m", "sigma", "delta", "seed"])
        w.writerow([problem.variant, problem.m,
                    repr(noisy.sigma) if noisy else "", repr(noisy.delta) if noisy else "",
                    noisy.seed if noisy else ""])


def load_problem_csv(directory):
    """Inverse of :func:`save_problem_csv`. Returns ``(problem, noisy or None)``."""
    directory = Path(directory)
    A = np.loadtxt(directory / "A.csv", delimiter=",", ndmin=2)
    with open(directory / "vectors.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    with open(directory / "meta.csv", newline="") as fh:
        meta = next(csv.DictReader(fh))
    y = np.array([float(r["y"]) for r in rows])
    x_true = np.array([float(r["x_true"]) for r in rows])
    problem = TestProblem(m=A.shape[0], A=A, y=y, x_true=x_true, variant=meta["variant"])
    noisy = None
    if rows and "y_delta" in rows[0]:
        noisy = NoisyData(
            y_delta=np.array([float(r["y_delta"]) for r in rows]),
            delta=float(meta["delta"]), sigma=float(meta["sigma"]), seed=int(meta["seed"]),
        )
    return problem, noisy
