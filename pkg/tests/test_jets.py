import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaussrank import expr as E
from gaussrank.jets import (Jet3, JetError, finite_difference_check, jet_add, jet_mul, jet_pow,
                            jet_scale, seed_point, seed_variable)
from gaussrank.numeric import complex_normal


def _random_jet(rng, n):
    x = seed_point(complex_normal(rng, n))
    # a nonlinear combination so every derivative slot is populated
    a, b = x[0], x[n - 1]
    return a * a * b + 3 * a - b * b * b + 0.5j


def _max_diff(a, b):
    return max(np.max(np.abs(a.value - b.value)), np.max(np.abs(a.grad - b.grad)),
               np.max(np.abs(a.hess - b.hess)), np.max(np.abs(a.third - b.third)))


def _scale(*jets):
    return 1 + max(max(np.max(np.abs(j.value)), np.max(np.abs(j.grad)),
                       np.max(np.abs(j.hess)), np.max(np.abs(j.third))) for j in jets)


def test_seed_variable_is_coordinate_jet():
    j = seed_variable(0, 2 + 0j, 2)
    assert j.value == 2
    np.testing.assert_array_equal(j.grad, [1, 0])
    assert not np.any(j.hess) and not np.any(j.third)


def test_seed_variable_index_out_of_range():
    with pytest.raises(JetError):
        seed_variable(1, 0, 1)


def test_product_of_coordinates_leibniz():
    a, b = 1.5 - 2j, 0.25 + 1j
    p = jet_mul(seed_variable(0, a, 2), seed_variable(1, b, 2))
    assert p.value == pytest.approx(a * b)
    np.testing.assert_allclose(p.grad, [b, a])
    np.testing.assert_allclose(p.hess, [[0, 1], [1, 0]])
    assert not np.any(p.third)


def test_square_of_sum_against_hand_derivatives():
    # (x+y)^2: gradient 2(x+y)(1,1), Hessian 2 everywhere
    x, y = seed_variable(0, 1, 2), seed_variable(1, 1, 2)
    j = jet_pow(jet_add(x, y), 2)
    assert j.value == pytest.approx(4)
    np.testing.assert_allclose(j.grad, [4, 4])
    np.testing.assert_allclose(j.hess, np.full((2, 2), 2))


def test_cube_against_hand_derivatives():
    j = jet_pow(seed_variable(0, 2, 1), 3)
    assert j.value == pytest.approx(8)
    assert j.grad[0] == pytest.approx(12)
    assert j.hess[0, 0] == pytest.approx(12)
    assert j.third[0, 0, 0] == pytest.approx(6)


def test_multiplicative_identity(rng):
    j = _random_jet(rng, 3)
    one = Jet3.constant(1.0, 3)
    assert _max_diff(jet_mul(j, one), j) == 0


def test_scale_matches_mul_by_constant(rng):
    j = _random_jet(rng, 2)
    assert _max_diff(jet_scale(j, 2 - 1j), jet_mul(j, Jet3.constant(2 - 1j, 2))) < 1e-14


def test_mismatched_parameter_counts():
    with pytest.raises(JetError):
        seed_variable(0, 1, 2) + seed_variable(0, 1, 3)


def test_constant_jet_has_zero_derivatives():
    c = Jet3.constant(3 - 4j, 4)
    assert not np.any(c.grad) and not np.any(c.hess) and not np.any(c.third)


def test_power_rejects_negative_exponent(rng):
    with pytest.raises(JetError):
        jet_pow(_random_jet(rng, 2), -1)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(1, 4))
def test_ring_axioms(seed, n):
    rng = np.random.default_rng(seed)
    a, b, c = (_random_jet(rng, n) for _ in range(3))
    scale = _scale(a, b, c) ** 3
    assert _max_diff((a + b) + c, a + (b + c)) / scale < 1e-12
    assert _max_diff(a * (b + c), a * b + a * c) / scale < 1e-12
    assert _max_diff(a * b, b * a) / scale < 1e-12
    assert _max_diff((a * b) * c, a * (b * c)) / scale < 1e-12


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(1, 4))
def test_composites_stay_symmetric(seed, n):
    rng = np.random.default_rng(seed)
    j = _random_jet(rng, n) * _random_jet(rng, n) ** 2
    assert np.array_equal(j.hess, np.swapaxes(j.hess, -1, -2))
    for perm in [(0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]:
        assert np.array_equal(j.third, np.transpose(j.third, perm))
    assert j.is_symmetric()


def test_fd_check_low_degree_polynomial(rng):
    x, y = E.param(0), E.param(1)
    p = 3 * x ** 3 - 2j * x * y * y + y + 7
    assert finite_difference_check(p, complex_normal(rng, 2), h=1e-4) < 1e-6


def test_fd_check_constant_is_exact():
    assert finite_difference_check(E.const(5 - 1j), np.array([0.3, 0.7])) == 0


def test_fd_check_degree_five(rng):
    from gaussrank.variety import _exponents

    exps = list(_exponents(3, 5))
    p = E.monomial_poly(list(zip(exps, complex_normal(rng, len(exps)))))
    assert finite_difference_check(p, 0.5 * complex_normal(rng, 3)) < 1e-5


def test_numpy_fallback_matches_numba(monkeypatch, rng):
    from gaussrank.variety import random_polynomial_variety

    X = random_polynomial_variety(rng, 3, 4, 3)
    u = complex_normal(rng, 3)
    fast = X.program.run(u, order=3)
    monkeypatch.setenv("GAUSSRANK_NUMBA", "0")
    slow = X.program.run(u, order=3)
    assert _max_diff(fast, slow) < 1e-12 * _scale(fast)
