import numpy as np
import pytest

from gaussrank import expr as E
from gaussrank import variety as V
from gaussrank.errors import (DimensionMismatch, FrameDependence, NonGeneric, RankDrop)
from gaussrank.frames import DirectionField
from gaussrank.gauss import gauss_rank
from gaussrank.numeric import complex_normal, projective_distance


def _conic_P3():
    t = E.param(0)
    return V.ParametrizedVariety("conic", 1, 3, [E.const(1), t, t * t, E.const(0)])


def _conic_P5(rng):
    # a conic spanning a random plane of P5
    t = E.param(0)
    P = complex_normal(rng, (3, 6))
    return V.ParametrizedVariety("conic", 1, 5, [E.const(P[0, c]) + t * P[1, c] + t * t * P[2, c]
                                                 for c in range(6)])


# -- evaluation --------------------------------------------------------------

def test_evaluate_linear_parametrization():
    X = V.ParametrizedVariety("plane", 2, 2, [E.const(1), E.param(0), E.param(1)])
    jets = X.evaluate([3, 5], order=1)
    np.testing.assert_allclose(jets.value, [1, 3, 5])
    np.testing.assert_allclose(jets.grad, [[0, 0], [1, 0], [0, 1]])


def test_evaluate_twisted_cubic(twisted_cubic):
    jets = twisted_cubic.evaluate([2.0], order=1)
    np.testing.assert_allclose(jets.value, [1, 2, 4, 8])
    np.testing.assert_allclose(jets.grad[:, 0], [0, 1, 4, 12])


def test_order_zero_has_no_derivatives(rng):
    X = V.random_polynomial_variety(rng, 2, 4, 3)
    jets = X.evaluate(complex_normal(rng, 2), order=0)
    assert not np.any(jets.grad) and not np.any(jets.hess) and not np.any(jets.third)


def test_wrong_coordinate_count():
    with pytest.raises(DimensionMismatch):
        V.ParametrizedVariety("bad", 1, 3, [E.const(1), E.param(0)])


# -- joins, cones, secants ---------------------------------------------------

def test_join_of_two_points_is_a_line():
    X = V.join([V.linear_space([[1, 0, 0]]), V.linear_space([[0, 1, 0]])])
    assert X.n == 1
    assert gauss_rank(X).r == 0


def test_join_of_two_conics_in_P5(rng):
    X = V.join([_conic_P5(rng), _conic_P5(rng)])
    assert X.n == 3
    assert gauss_rank(X, seed=1).f == 1


def test_join_needs_common_ambient():
    with pytest.raises(DimensionMismatch):
        V.join([V.rational_normal_curve(3), V.rational_normal_curve(4)])


def test_cone_fiber_contains_ruling(conic_cone):
    from gaussrank.focal import fiber_through

    u = np.array([0.3 + 0.2j, 0.7 - 0.1j])
    fiber = fiber_through(conic_cone, u)
    vertex = np.array([0, 0, 0, 1], complex)
    A = np.column_stack([fiber.base, fiber.direction])
    resid = vertex - A @ np.linalg.lstsq(A, vertex, rcond=None)[0]
    assert np.linalg.norm(resid) < 1e-10


def test_cone_over_conic(conic_cone):
    assert conic_cone.n == 2
    assert gauss_rank(conic_cone).f == 1


def test_cone_with_vertex_on_curve_is_degenerate():
    # vertex phi(0): the cone collapses onto the conic's plane, and the ruling
    # through the vertex parameter is a non-immersive locus
    X = V.cone(_conic_P3(), [[1, 0, 0, 0]])
    rank, _ = V.tangent_rank(X, np.array([0.0, 0.4]))
    assert rank < X.n
    assert gauss_rank(X).f == 2


def test_secant_of_conic_fills_plane():
    t = E.param(0)
    conic = V.ParametrizedVariety("conic", 1, 2, [E.const(1), t, t * t])
    assert V.effective_dimension(V.secant_variety(conic)) == 2


def test_secant_of_twisted_cubic_fills_P3(twisted_cubic):
    X = V.secant_variety(twisted_cubic)
    assert X.n == 3
    assert V.effective_dimension(X) == 3


def test_secant_of_quartic_is_degenerate_hypersurface():
    X = V.secant_variety(V.rational_normal_curve(4))
    assert (X.n, X.N) == (3, 4)
    assert gauss_rank(X).f >= 1


# -- tangent constructions ---------------------------------------------------

def test_tangential_twisted_cubic(twisted_cubic):
    X = V.tangential_variety(twisted_cubic)
    assert X.n == 2
    assert gauss_rank(X).f == 1


def test_tangential_of_line_is_not_immersive(rng):
    X = V.tangential_variety(V.linear_space([[1, 0, 0, 0], [0, 1, 0, 0]]))
    with pytest.raises(NonGeneric):
        V.generic_sample(X, rng)


def test_tangential_surface_floor():
    Y = V.random_polynomial_variety(np.random.default_rng(4), 2, 5, 3)
    assert gauss_rank(V.tangential_variety(Y)).f >= 1


def test_osculating_twisted_cubic_fills_P3(twisted_cubic):
    assert V.effective_dimension(V.osculating_variety(twisted_cubic)) == 3


def test_osculating_quintic_is_degenerate():
    X = V.osculating_variety(V.rational_normal_curve(5))
    assert X.n == 3
    assert gauss_rank(X).f >= 1


def test_osculating_plane_curve_is_its_plane():
    t = E.param(0)
    C = V.ParametrizedVariety("plane cubic", 1, 3, [E.const(1), t, t ** 3, E.const(0)])
    assert V.effective_dimension(V.osculating_variety(C)) == 2


def test_osculating_order_three_unsupported(twisted_cubic):
    with pytest.raises(ValueError):
        V.osculating_variety(twisted_cubic, order=3)


# -- bands ---------------------------------------------------------------------

def _linear_field(rng, N):
    A = complex_normal(rng, (N + 1, 2))
    return [E.const(a) + E.param(0) * E.const(b) for a, b in A]


def test_hyperband_over_curve_in_P3(twisted_cubic, rng):
    X = V.hyperband(twisted_cubic, V.FrameField(twisted_cubic, [_linear_field(rng, 3)]))
    assert X.n == 2
    assert gauss_rank(X).f >= 1


def test_hyperband_frame_in_tangent_space(twisted_cubic):
    d = E.diff(list(twisted_cubic.coords), 0)
    with pytest.raises(FrameDependence):
        V.hyperband(twisted_cubic, V.FrameField(twisted_cubic, [d]))


def test_hyperband_over_surface_in_P5(rng):
    Y = V.random_polynomial_variety(np.random.default_rng(17), 2, 5, 2)
    frame = [[E.const(c[0]) + E.param(0) * E.const(c[1]) + E.param(1) * E.const(c[2])
              for c in complex_normal(rng, (6, 3))] for _ in range(2)]
    X = V.hyperband(Y, V.FrameField(Y, frame))
    assert X.n == 4
    assert gauss_rank(X).f >= 1


def test_plane_band_with_second_derivative_is_osculating(rng):
    C = V.rational_normal_curve(4)
    g = E.diff(E.diff(list(C.coords), 0), 0)
    X = V.plane_band(C, V.FrameField(C, [g]))
    O = V.osculating_variety(C)
    for _ in range(3):
        u = complex_normal(rng, 3)
        assert V.point_membership(O, X.values(u), u0=u) < 1e-8


def test_plane_band_over_line_rejected():
    L = V.linear_space([[1, 0, 0, 0], [0, 1, 0, 0]])
    g = [E.const(0), E.const(0), E.const(1), E.const(0)]
    with pytest.raises(RankDrop):
        V.plane_band(L, V.FrameField(L, [g]))


def test_plane_band_frame_dependence():
    C = V.rational_normal_curve(4)
    d = E.diff(list(C.coords), 0)
    with pytest.raises(FrameDependence):
        V.plane_band(C, V.FrameField(C, [d]))


# -- line unions -----------------------------------------------------------------

def test_line_union_along_ruling_is_not_immersive(ruled_quadric, rng):
    X = V.line_union(ruled_quadric, DirectionField.user([E.const(1), E.const(0)]))
    with pytest.raises(NonGeneric):
        V.generic_sample(X, rng)


def test_line_union_tangent_field_equals_tangential(twisted_cubic, rng):
    X = V.line_union(twisted_cubic, DirectionField.user([E.const(1)]))
    T = V.tangential_variety(twisted_cubic)
    for _ in range(5):
        u = complex_normal(rng, 2)
        assert V.point_membership(T, X.values(u), u0=u) < 1e-8


def test_conjugate_line_union_has_one_dimensional_fibers():
    Y = V.random_polynomial_variety(np.random.default_rng(6), 2, 4, 3)
    X = V.line_union(Y, DirectionField.conjugate(0))
    assert X.n == 3
    assert gauss_rank(X).f == 1


# -- duals -------------------------------------------------------------------------

def test_dual_of_generic_surface_in_P4():
    S = V.random_polynomial_variety(np.random.default_rng(5), 2, 4, 3)
    X = V.dual_variety(S)
    assert (X.n, X.N) == (3, 4)
    assert gauss_rank(X).f == 1


def test_dual_of_plane_is_flagged(rng):
    X = V.dual_variety(V.linear_space(np.eye(5)[:3]))
    with pytest.raises(NonGeneric):
        V.generic_sample(X, rng)


def test_double_dual_returns_the_surface(rng):
    S = V.random_polynomial_variety(np.random.default_rng(5), 2, 4, 2)
    DD = V.dual_variety(V.dual_variety(S))
    for _ in range(5):
        point = DD.values(complex_normal(rng, DD.n))
        assert V.point_membership(S, point, rng=rng) < 1e-6


# -- transformations ---------------------------------------------------------------

def test_projective_transform_maps_points(rng, twisted_cubic):
    M = complex_normal(rng, (4, 4))
    Xm = V.projective_transform(twisted_cubic, M)
    u = complex_normal(rng, 1)
    assert projective_distance(Xm.values(u), M @ twisted_cubic.values(u)) < 1e-12


def test_reparametrize_composes(rng):
    X = V.random_polynomial_variety(rng, 2, 4, 3)
    A, b = complex_normal(rng, (2, 2)), complex_normal(rng, 2)
    Xr = V.reparametrize(X, A, b)
    w = complex_normal(rng, 2)
    np.testing.assert_allclose(Xr.values(w), X.values(A @ w + b), rtol=1e-10)
