import numpy as np
import pytest

from gaussrank import variety as V
from gaussrank.errors import UnsupportedFiberDimension, ZeroPolynomial
from gaussrank.focal import (fiber_focus, fiber_through, focus_polynomial, focus_report,
                             focus_roots, sweep_dimension)
from gaussrank.numeric import complex_normal, projective_distance
from gaussrank.suite import FOCAL_SUITE, case_by_name


def _on_line(point, fiber):
    A = np.column_stack([fiber.base, fiber.direction])
    p = point / np.linalg.norm(point)
    return np.linalg.norm(p - A @ np.linalg.lstsq(A, p, rcond=None)[0])


def test_veronese_has_no_fiber(veronese):
    with pytest.raises(UnsupportedFiberDimension):
        fiber_through(veronese, [0.2, 0.3])


def test_tangential_fiber_is_the_tangent_line(twisted_cubic, rng):
    X = V.tangential_variety(twisted_cubic)
    u, jets, _ = V.generic_sample(X, rng)
    fiber = fiber_through(X, u, jets)
    t = u[0]
    assert _on_line(twisted_cubic.values([t]), fiber) < 1e-10
    tangent = twisted_cubic.evaluate([t], order=1).grad[:, 0]
    assert _on_line(tangent, fiber) < 1e-10


def test_threefold_focus_has_degree_two(rng):
    X = case_by_name("dual_cubic_surface_P4").build()
    u, jets, _ = V.generic_sample(X, rng)
    fiber = fiber_through(X, u, jets)
    assert focus_polynomial(X, fiber).order == 2


def test_cone_focus_is_the_vertex(conic_cone, rng):
    u, jets, _ = V.generic_sample(conic_cone, rng)
    focus, fiber = fiber_focus(conic_cone, u, jets=jets)
    assert focus_polynomial(conic_cone, fiber).order == 1
    assert focus.pattern == (1,)
    assert projective_distance(focus.points[0], [0, 0, 0, 1]) < 1e-8


def test_join_foci_are_the_anchor_points(rng):
    Y1 = V.random_polynomial_variety(np.random.default_rng(3), 1, 4, 3)
    Y2 = V.random_polynomial_variety(np.random.default_rng(4), 1, 4, 3)
    X = V.join([Y1, Y2])
    u, jets, _ = V.generic_sample(X, rng)
    focus, _ = fiber_focus(X, u, jets=jets)
    assert focus.pattern == (1, 1)
    # parameters are (u1, u2, t): the secant line joins phi1(u1) and phi2(u2)
    for anchor in (Y1.values(u[:1]), Y2.values(u[1:2])):
        assert min(projective_distance(anchor, p) for p in focus.points) < 1e-6


def test_focus_roots_simple():
    roots = focus_roots(np.poly1d([1, 0, -1]))
    assert [m for _, m in roots] == [1, 1]
    assert sorted(r.real for r, _ in roots) == pytest.approx([-1, 1])


def test_focus_roots_double():
    roots = focus_roots(np.poly1d([1, -4, 4]))
    assert len(roots) == 1
    assert roots[0][1] == 2
    assert abs(roots[0][0] - 2) < 1e-6


def test_focus_roots_zero_polynomial():
    with pytest.raises(ZeroPolynomial):
        focus_roots(np.poly1d([0.0]))


def test_plane_band_double_focus_on_curve(rng):
    X = case_by_name("plane_band_quartic_P4").build()
    C = V.rational_normal_curve(4)
    u, jets, _ = V.generic_sample(X, rng)
    focus, _ = fiber_focus(X, u, jets=jets)
    assert focus.pattern == (2,)
    assert V.point_membership(C, focus.points[0], u0=u[:1]) < 1e-6


@pytest.mark.parametrize("name,sweeps", [("cone_conic_P3", [0]),
                                         ("join_two_cubics_P4", [1, 1]),
                                         ("dual_cubic_surface_P4", [2, 2])])
def test_sweep_dimensions(name, sweeps, rng):
    X = case_by_name(name).build()
    u, jets, _ = V.generic_sample(X, rng)
    focus, fiber = fiber_focus(X, u, jets=jets)
    assert sweep_dimension(X, focus, fiber) == sweeps


@pytest.mark.parametrize("name", FOCAL_SUITE)
def test_focus_degree_on_suite(name):
    X = case_by_name(name).build()
    rep = focus_report(X, seed=2, fibers=5)
    assert all(fb.degree == X.n - 1 for fb in rep.fibers)
    assert all(0 <= s <= X.n - 1 for fb in rep.fibers for s in fb.sweeps)


def test_focus_report_is_deterministic(conic_cone):
    a = focus_report(conic_cone, seed=5, fibers=3)
    b = focus_report(conic_cone, seed=5, fibers=3)
    assert a.roots == b.roots and a.sweeps == b.sweeps


def test_focal_pattern_is_projectively_invariant(rng):
    X = case_by_name("plane_band_quartic_P4").build()
    Xm = V.projective_transform(X, complex_normal(rng, (5, 5)))
    a, b = focus_report(X, fibers=3), focus_report(Xm, fibers=3)
    assert a.pattern == b.pattern and a.sweeps == b.sweeps
