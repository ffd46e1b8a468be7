import numpy as np
import pytest

from gaussrank import variety as V
from gaussrank.errors import AllSamplesAmbiguous, OracleMismatch, ProvenanceError
from gaussrank.gauss import (MAX_PARAM_STEP, capped_step, gauss_rank, pluecker_gauss,
                             stencil_derivative, stencil_noise, terracini_check)
from gaussrank.numeric import complex_normal, gap_rank, projective_distance
from gaussrank.suite import hypersurface_graph


def _conic_P5(rng):
    from gaussrank import expr as E

    t = E.param(0)
    P = complex_normal(rng, (3, 6))
    return V.ParametrizedVariety("conic", 1, 5, [E.const(P[0, c]) + t * P[1, c] + t * t * P[2, c]
                                                 for c in range(6)])


def test_line_has_constant_pluecker_vector(rng):
    L = V.linear_space([[1, 0, 0], [0, 1, 1]])
    p0 = pluecker_gauss(L, complex_normal(rng, 1))
    for _ in range(3):
        assert projective_distance(pluecker_gauss(L, complex_normal(rng, 1)), p0) < 1e-12


def test_pluecker_phase_convention(rng, twisted_cubic):
    p = pluecker_gauss(twisted_cubic, complex_normal(rng, 1))
    assert abs(np.linalg.norm(p) - 1) < 1e-12
    k = int(np.argmax(np.abs(p) > 1e-9))
    assert abs(p[k].imag) < 1e-15 and p[k].real > 0


def test_twisted_cubic_pluecker_vector_moves(twisted_cubic):
    assert np.linalg.norm(pluecker_gauss(twisted_cubic, [0.0]) - pluecker_gauss(twisted_cubic, [1.0])) > 1e-3


def test_pluecker_constant_along_cone_ruling(conic_cone):
    a = pluecker_gauss(conic_cone, [0.4 + 0.1j, 0.3])
    b = pluecker_gauss(conic_cone, [0.4 + 0.1j, -2.0 + 1j])
    assert projective_distance(a, b) < 1e-12


def test_linear_plane_rank_zero():
    g = gauss_rank(V.linear_space(np.eye(5)[:3]))
    assert (g.r, g.f) == (0, 2)


def test_tangential_twisted_cubic_rank(twisted_cubic):
    g = gauss_rank(V.tangential_variety(twisted_cubic), samples=20)
    assert (g.n, g.r, g.f) == (2, 1, 1)
    assert all(s.pluecker_rank == 1 and s.fiber_dim == 1 for s in g.samples)


def test_hypersurface_graph_is_nondegenerate():
    g = gauss_rank(hypersurface_graph())
    assert (g.r, g.f) == (3, 0)


def test_non_immersive_variety_is_all_ambiguous():
    X = V.tangential_variety(V.linear_space([[1, 0, 0, 0], [0, 1, 0, 0]]))
    with pytest.raises(AllSamplesAmbiguous):
        gauss_rank(X, samples=3)


def test_absurd_tolerance_surfaces_oracle_disagreement():
    # tolerance near 1 collapses ranks inconsistently between the two oracles
    X = V.random_polynomial_variety(np.random.default_rng(3), 3, 6, 3)
    with pytest.raises((OracleMismatch, AllSamplesAmbiguous)):
        for tol in (0.3, 0.5, 0.7):
            gauss_rank(X, samples=10, tol=tol)


def test_gauss_rank_is_deterministic(twisted_cubic):
    X = V.tangential_variety(twisted_cubic)
    a, b = gauss_rank(X, seed=7), gauss_rank(X, seed=7)
    assert [s.u.tolist() for s in a.samples] == [s.u.tolist() for s in b.samples]


def test_thread_count_does_not_change_results(monkeypatch, twisted_cubic):
    X = V.tangential_variety(twisted_cubic)
    monkeypatch.setenv("GAUSSRANK_THREADS", "1")
    serial = gauss_rank(X, seed=3)
    monkeypatch.setenv("GAUSSRANK_THREADS", "4")
    parallel = gauss_rank(X, seed=3)
    assert [s.u.tolist() for s in serial.samples] == [s.u.tolist() for s in parallel.samples]


def test_stencil_is_fourth_order():
    h = 1e-2
    f = np.exp
    vals = [f(c * h) for c in (-2, -1, 1, 2)]
    assert abs(stencil_derivative(vals, h) - 1) < 1e-8


def test_stencil_noise_ignores_smooth_data():
    h = 1e-3
    vals = [np.exp(c * h) for c in (-2, -1, 1, 2)]
    assert stencil_noise(vals, 1.0, h) < 1e-9


def test_stencil_noise_tracks_perturbations():
    rng = np.random.default_rng(3)
    h, eps = 1e-5, 1e-9
    est = []
    for _ in range(200):
        vals = [np.sin(c * h) + eps * rng.standard_normal() for c in (-2, -1, 1, 2)]
        center = eps * rng.standard_normal()
        est.append(stencil_noise(vals, center, h))
    # true derivative noise is eps * sqrt(130) / (12 h)
    true = eps * np.sqrt(130.0) / (12 * h)
    assert 0.5 * true < np.sqrt(np.mean(np.square(est))) < 2 * true


def test_capped_step_limits_parameter_move():
    short = np.array([0.5, 0.0])
    long = np.array([1e4, 0.0])
    assert capped_step(short, 1e-5) == 1e-5
    assert np.isclose(capped_step(long, 1e-5) * 1e4, MAX_PARAM_STEP)


def test_gap_rank_noise_floor():
    sv = [1.0, 1e-3, 1e-12]
    assert gap_rank(sv)[0] == 2
    assert gap_rank(sv, floor=1e-2) == (1, False)


@pytest.mark.parametrize("tol", [1e-6, 1e-7, 1e-8])
def test_rank_stable_under_tolerance(tol, twisted_cubic, conic_cone):
    assert gauss_rank(V.tangential_variety(twisted_cubic), tol=tol).f == 1
    assert gauss_rank(conic_cone, tol=tol).f == 1
    assert gauss_rank(hypersurface_graph(), tol=tol).f == 0


def test_terracini_along_join_of_conics(rng):
    X = V.join([_conic_P5(rng), _conic_P5(rng)])
    assert terracini_check(X, trials=10, seed=1) < 1e-7


def test_terracini_fails_off_the_fiber(rng):
    X = V.join([_conic_P5(rng), _conic_P5(rng)])
    assert terracini_check(X, trials=10, seed=1, block=0) > 1e-2


def test_terracini_on_cone(conic_cone):
    assert terracini_check(conic_cone, trials=10) < 1e-7


def test_terracini_needs_join_provenance(twisted_cubic):
    with pytest.raises(ProvenanceError):
        terracini_check(V.tangential_variety(twisted_cubic))
