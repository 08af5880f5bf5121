import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hilbert_iter.errors import DomainError
from hilbert_iter.filters import AlphaSequence, check_properties, eval_g, eval_r, oracle_solution
from hilbert_iter.hilbert_scale import build_scale_operator
from hilbert_iter.iteration import LinearSetup, run_sequence
from hilbert_iter.problems import galerkin_deriv2

alpha_lists = st.lists(st.floats(-8, 3).map(lambda e: 10.0**e), min_size=1, max_size=20)


def test_sigma_n():
    seq = AlphaSequence((1.0, 0.5, 0.25))
    assert seq.sigma_n == 7.0
    assert AlphaSequence().sigma_n == 0.0


def test_rejects_nonpositive_alpha():
    with pytest.raises(DomainError):
        AlphaSequence((1.0, 0.0))


def test_single_step_filters():
    seq = AlphaSequence((1.0,))
    assert eval_g(seq, 1.0) == pytest.approx(0.5, rel=1e-15)
    assert eval_r(seq, 1.0) == pytest.approx(0.5, rel=1e-15)


def test_two_step_g():
    assert eval_g(AlphaSequence((1.0, 1.0)), 1.0) == pytest.approx(0.75, rel=1e-15)


def test_r_at_zero():
    assert eval_r(AlphaSequence((0.3, 2.0)), 0.0) == 1.0


def test_g_small_lambda_limit():
    seq = AlphaSequence((1e-3, 0.2, 5.0))
    assert eval_g(seq, 1e-12 * 1e-3) == pytest.approx(seq.sigma_n, rel=1e-6)


def _g_reference(alphas, lam):
    # exact rational evaluation: g = (prod(lam + a) - prod(a)) / (lam prod(lam + a))
    from fractions import Fraction

    lam = Fraction(lam)
    num_a = [Fraction(a) for a in alphas]
    p_shift = np.prod([lam + a for a in num_a])
    p = np.prod(num_a)
    return float((p_shift - p) / (lam * p_shift))


@pytest.mark.parametrize("lam_scale", [1e-14, 1e-10, 1e-4, 1.0, 1e3])
def test_g_stable_relative_accuracy(lam_scale):
    alphas = (3e-4, 0.07, 1.0, 12.0)
    lam = lam_scale * min(alphas)
    assert eval_g(AlphaSequence(alphas), lam) == pytest.approx(_g_reference(alphas, lam), rel=1e-10)


def test_g_domain():
    with pytest.raises(DomainError):
        eval_g(AlphaSequence((1.0,)), 0.0)


def test_property_iii_example():
    seq = AlphaSequence((1.0, 1.0))
    assert 1.0 * eval_r(seq, 1.0) == pytest.approx(0.25)
    assert 1 / seq.sigma_n == 0.5
    assert max(check_properties(seq, [1.0]).values()) <= 1e-15


def test_property_i_tight_near_zero():
    seq = AlphaSequence((0.01, 0.5))
    assert eval_g(seq, 1e-14) / seq.sigma_n == pytest.approx(1.0, abs=1e-10)


@settings(max_examples=200, deadline=None)
@given(alphas=alpha_lists, lam=st.floats(-10, 2).map(lambda e: 10.0**e))
def test_identity_and_properties(alphas, lam):
    seq = AlphaSequence(tuple(alphas))
    assert abs(lam * eval_g(seq, lam) + eval_r(seq, lam) - 1) <= 1e-13
    rep = check_properties(seq, [lam])
    assert max(rep.values()) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(alphas=alpha_lists, extra=st.floats(-8, 3).map(lambda e: 10.0**e),
       lam=st.floats(-4, 2).map(lambda e: 10.0**e))
def test_appending_alpha_decreases_r(alphas, extra, lam):
    seq = AlphaSequence(tuple(alphas))
    r_old = eval_r(seq, lam)
    r_new = eval_r(seq.append(extra), lam)
    assert r_new <= r_old
    if lam / extra > 1e-8 and r_old > 1e-250:
        assert r_new < r_old


def test_limits():
    lam = 0.3
    assert eval_r(AlphaSequence((1e-9,) * 3), lam) < 1e-20       # sigma_n -> infinity
    assert eval_r(AlphaSequence((1e9,) * 3), lam) > 1 - 1e-8     # sigma_n -> 0


def test_property_sweep_1000_sequences():
    rng = np.random.default_rng(5)
    grid = np.logspace(-10, 2, 120)
    worst = 0.0
    for _ in range(1000):
        n = rng.integers(1, 21)
        seq = AlphaSequence(tuple(10 ** rng.uniform(-8, 3, n)))
        worst = max(worst, max(check_properties(seq, grid).values()))
    assert worst <= 1e-12


class TestOracle:
    m = 20

    @pytest.fixture
    def data(self, rng):
        A = galerkin_deriv2(self.m)
        S = build_scale_operator(self.m)
        return A, S, 1e-2 * rng.standard_normal(self.m), 0.1 * rng.standard_normal(self.m)

    def test_empty_sequence(self, data):
        A, S, y, x0 = data
        np.testing.assert_array_equal(oracle_solution(A, S, 1.0, AlphaSequence(), y, x0), x0)

    def test_zero_residual(self, data):
        A, S, _, x0 = data
        x = oracle_solution(A, S, 1.0, AlphaSequence((1e-4, 1e-5)), A @ x0, x0)
        np.testing.assert_allclose(x, x0, rtol=0, atol=1e-12)

    def test_matches_iteration(self, data, rng):
        A, S, y, x0 = data
        alphas = tuple(10 ** rng.uniform(-7, -1, 3))
        xo = oracle_solution(A, S, 1.0, AlphaSequence(alphas), y, x0)
        xi = run_sequence(LinearSetup(A, y, 0.0, s=1.0, x0=x0, S=S), alphas)
        assert np.linalg.norm(xi - xo) <= 1e-8 * np.linalg.norm(xo)
