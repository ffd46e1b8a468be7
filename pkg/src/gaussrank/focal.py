"""Fiber geometry for ``f = 1``: the fiber line through a point, the focus
``Z_F`` on it with multiplicities, and the dimension each focal component
sweeps out as the fiber moves.

The focus is computed from order-3 jets at a single base point.  Near the
fiber, ``X`` is the union of lines ``x(w) + t e(w)`` over the ``n - 1``
transverse parameters ``w``; it fails to be immersive where
``det(I + t D) = 0``, with ``D`` the derivative of the fiber direction read on
``T / <x, e>``.  ``D`` comes from differentiating the kernel of ``II``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (FiberVerificationError, FitResidualError, GaussRankError, RankDrop,
                     TrackingAmbiguity, UnsupportedFiberDimension, ZeroPolynomial)
from .frames import (gauss_fiber_space, kernel_dimension,
                     second_fundamental_form, tangent_frame)
from .gauss import NOISE_FACTOR, STENCIL, pluecker_gauss, stencil_derivative, stencil_noise
from .numeric import (TOL_RANK, complex_normal, gap_rank, ordered_map, projective_distance,
                      sample_rng)
from .variety import DEFAULT_RETRIES, generic_sample, locate

FOCUS_CLUSTER_TOL = 1e-4
FIT_RESIDUAL = 1e-6
LEADING_TOL = 1e-10
SWEEP_STEP = 1e-5


@dataclass
class FiberLine:
    """The Gauss fiber through ``X(u)`` as ``t -> base + t * direction``.

    ``base`` is the unit lift of the point, ``direction`` the unit lift of the
    fiber direction orthogonal to it, ``kappa`` the fiber direction in
    parameter coordinates.
    """

    u: np.ndarray
    base: np.ndarray
    direction: np.ndarray
    kappa: np.ndarray
    jets: object = field(default=None, repr=False)
    frame: object = field(default=None, repr=False)
    II: object = field(default=None, repr=False)

    def point(self, t):
        return self.base + t * self.direction


def _fiber_data(X, u, jets=None, tol=TOL_RANK):
    u = np.asarray(u, dtype=complex)
    if jets is None:
        jets = X.evaluate(u, order=3)
    frame = tangent_frame(X, u, jets, tol)
    II = second_fundamental_form(X, u, jets, frame, tol)
    dim, amb = kernel_dimension(II, tol)
    if amb:
        raise RankDrop("ambiguous II kernel at the sample")
    if dim != 1:
        raise UnsupportedFiberDimension(f"fiber dimension {dim} at the sample; only f = 1 is supported")
    kappa = gauss_fiber_space(II, tol)[:, 0]
    psi = jets.value
    xh = psi / np.linalg.norm(psi)
    e = jets.grad @ kappa
    e = e - xh * np.vdot(xh, e)
    return FiberLine(u=u, base=xh, direction=e / np.linalg.norm(e), kappa=kappa,
                     jets=jets, frame=frame, II=II)


def fiber_through(X, u, jets=None, tol=TOL_RANK, verify=True, checks=5, seed=0,
                  check_tol=1e-6):
    """The fiber line through ``X(u)``, optionally verified.

    Verification locates ``checks`` random points of the line on ``X`` and
    requires the same embedded tangent space there as at ``u``.
    """
    fiber = _fiber_data(X, u, jets, tol)
    if verify:
        verify_fiber(X, fiber, checks=checks, seed=seed, tol=check_tol)
    return fiber


def verify_fiber(X, fiber, checks=5, seed=0, tol=1e-6):
    rng = np.random.default_rng(seed)
    p0 = pluecker_gauss(X, fiber.u)
    worst = 0.0
    for _ in range(checks):
        t = complex_normal(rng, 1)[0]
        t = 0.5 * t / abs(t) * rng.uniform(0.3, 1.0)
        u = fiber.u
        for frac in (0.25, 0.5, 0.75, 1.0):
            u, dist = locate(X, fiber.point(frac * t), u0=u, starts=1)
        if dist > 1e-8:
            raise FiberVerificationError(f"fiber point t={t:.3g} not found on X (distance {dist:.2e})")
        worst = max(worst, projective_distance(pluecker_gauss(X, u), p0))
    if worst > tol:
        raise FiberVerificationError(f"tangent space moves along the fiber ({worst:.2e})")
    return worst


def _truncated_pinv(M, rank):
    U, s, Vh = np.linalg.svd(M, full_matrices=False)
    return (Vh[:rank].conj().T / s[:rank]) @ U[:, :rank].conj().T


def fiber_map_derivative(fiber):
    """``(D, alpha, beta, scale)`` describing the focus on ``fiber``.

    ``D`` is the ``(n-1) x (n-1)`` derivative of the fiber direction along the
    transverse directions, read on ``T / <x, e>``.
    """
    jets = fiber.jets
    n = jets.n
    psi, J, Hs, T3 = jets.value, jets.grad, jets.hess, jets.third
    W = np.column_stack([psi, J])
    U, _, _ = np.linalg.svd(W, full_matrices=True)
    H = U[:, n + 1:].conj().T
    Wp = np.linalg.pinv(W)
    kappa = fiber.kappa / np.linalg.norm(fiber.kappa)
    S = np.einsum("mk,kab->mab", H, Hs).reshape(-1, n)
    S_pinv = _truncated_pinv(S, n - 1)
    L = np.linalg.svd(kappa[None, :].conj())[2][1:].conj().T  # orthonormal complement
    Hk = np.einsum("kab,b->ka", Hs, kappa)
    cols = []
    for l in range(n - 1):
        ell = L[:, l]
        dW = np.column_stack([J @ ell, np.einsum("kab,b->ka", Hs, ell)])
        dH = -H @ dW @ Wp
        dII_k = (np.einsum("mk,kabc,b,c->ma", H, T3, kappa, ell)
                 + np.einsum("mk,ka->ma", dH, Hk))
        dkappa = -S_pinv @ dII_k.reshape(-1)
        de = np.einsum("kab,a,b->k", Hs, kappa, ell) + J @ dkappa
        c = Wp @ de
        cols.append(c[1:])
    A = np.column_stack(cols) if cols else np.zeros((n, 0), complex)
    D = L.conj().T @ A
    norm = np.linalg.norm(psi)
    xh = psi / norm
    e = J @ kappa
    alpha = np.vdot(xh, e)
    beta = np.linalg.norm(e - alpha * xh)
    return D, alpha, beta, norm


def focus_polynomial(X, fiber, residual_tol=FIT_RESIDUAL, leading_tol=LEADING_TOL):
    """Polynomial in the fiber coordinate ``t`` whose roots are the focal points.

    The exact determinant is sampled at ``n + 2`` Chebyshev nodes and fitted
    by least squares to degree ``n - 1``; the fit residual is checked and
    negligible leading coefficients are dropped.  Returns ``np.poly1d``.
    """
    D, alpha, beta, scale = fiber_map_derivative(fiber)
    k = D.shape[0]
    A = scale * D - alpha * np.eye(k)

    def d(t):
        return np.linalg.det(beta * np.eye(k) + t * A) / beta ** k

    m = k + 3
    nodes = np.cos(np.pi * (np.arange(m) + 0.5) / m)
    vals = np.array([d(t) for t in nodes])
    V = np.vander(nodes, k + 1).astype(complex)
    coeffs, *_ = np.linalg.lstsq(V, vals, rcond=None)
    resid = np.linalg.norm(V @ coeffs - vals) / max(np.linalg.norm(vals), 1e-300)
    if resid > residual_tol:
        raise FitResidualError(f"focus polynomial fit residual {resid:.2e}")
    big = np.max(np.abs(coeffs))
    if big == 0:
        raise ZeroPolynomial("focus polynomial vanishes identically")
    start = 0
    while start < len(coeffs) - 1 and abs(coeffs[start]) < leading_tol * big:
        start += 1
    return np.poly1d(coeffs[start:])


def focus_roots(p, cluster_tol=FOCUS_CLUSTER_TOL):
    """Roots of ``p`` grouped into clusters: ``[(centroid, multiplicity), ...]``.

    Single-linkage clustering with threshold ``cluster_tol * max(1, max|root|)``.
    """
    coeffs = np.atleast_1d(np.asarray(p.coeffs if isinstance(p, np.poly1d) else p, complex))
    if not np.any(coeffs):
        raise ZeroPolynomial("zero polynomial (fiber dimension above one?)")
    roots = np.roots(coeffs)
    if roots.size == 0:
        return []
    thr = cluster_tol * max(1.0, float(np.max(np.abs(roots))))
    parent = list(range(roots.size))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(roots.size):
        for j in range(i + 1, roots.size):
            if abs(roots[i] - roots[j]) <= thr:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(roots.size):
        groups.setdefault(find(i), []).append(roots[i])
    out = [(complex(np.mean(g)), len(g)) for g in groups.values()]
    return sorted(out, key=lambda rm: (-rm[1], round(rm[0].real, 6), round(rm[0].imag, 6)))


@dataclass
class FiberFocus:
    """Focal data on one fiber: clusters, their points in ``C^{N+1}`` and sweeps."""

    u: np.ndarray
    roots: list
    points: list
    sweeps: list = None

    @property
    def pattern(self):
        return tuple(m for _, m in self.roots)

    @property
    def degree(self):
        return sum(self.pattern)


@dataclass
class FocusReport:
    """Focus on a representative fiber plus per-fiber evidence."""

    roots: list
    degree_check: int
    sweeps: list
    fiber_count: int
    fibers: list = field(default_factory=list, repr=False)

    @property
    def pattern(self):
        return tuple(m for _, m in self.roots)


def fiber_focus(X, u, cluster_tol=FOCUS_CLUSTER_TOL, tol=TOL_RANK, jets=None, fiber=None):
    """Focal clusters and focal points on the fiber through ``X(u)``."""
    if fiber is None:
        fiber = _fiber_data(X, u, jets, tol)
    roots = focus_roots(focus_polynomial(X, fiber), cluster_tol)
    points = [fiber.point(t) for t, _ in roots]
    return FiberFocus(u=fiber.u, roots=roots, points=points), fiber


def _transverse_directions(fiber):
    """Parameter directions for unit geometric steps transverse to the fiber."""
    R = fiber.frame.R
    kg = R @ fiber.kappa
    kg = kg / np.linalg.norm(kg)
    G = np.linalg.svd(kg[None, :].conj())[2][1:].conj().T
    return [np.linalg.solve(R, G[:, l]) for l in range(G.shape[1])]


def _chart(z, z0):
    z = z / np.linalg.norm(z)
    return z / np.vdot(z0, z)


def _match(points, target, cluster_tol):
    d = np.array([projective_distance(p, target) for p in points])
    order = np.argsort(d)
    if len(d) > 1 and d[order[1]] <= max(cluster_tol, 10 * d[order[0]]):
        raise TrackingAmbiguity("two focal points compete for the same track")
    return order[0]


def focal_tracks(X, focus, fiber, h=SWEEP_STEP, cluster_tol=FOCUS_CLUSTER_TOL, tol=TOL_RANK):
    """Focal points on neighbouring fibers, matched to the clusters of ``focus``.

    Returns ``(directions, tracks)``; ``tracks[i][l]`` lists the points of
    cluster ``i`` at ``STENCIL * h`` along transverse direction ``l``.
    """
    dirs = _transverse_directions(fiber)
    tracks = [[None] * len(dirs) for _ in focus.roots]
    for l, d in enumerate(dirs):
        around = []
        for c in STENCIL:
            other, _ = fiber_focus(X, fiber.u + c * h * d, cluster_tol, tol)
            if other.pattern != focus.pattern:
                raise TrackingAmbiguity("multiplicity pattern changes between nearby fibers")
            around.append(other.points)
        for i, z in enumerate(focus.points):
            tracks[i][l] = [pts[_match(pts, z, cluster_tol)] for pts in around]
    return dirs, tracks


def sweep_dimension(X, focus, fiber, h=SWEEP_STEP, cluster_tol=FOCUS_CLUSTER_TOL,
                    tol=TOL_RANK):
    """Dimension swept by each focal component as the fiber moves.

    Rank of the finite-difference Jacobian of the focal-point map along unit
    transverse directions, read in an affine chart around each focal point.
    Near-degenerate fibers amplify rounding in the focal points, so singular
    values below ``NOISE_FACTOR`` times the measured derivative noise are
    not counted.
    """
    _, tracks = focal_tracks(X, focus, fiber, h, cluster_tol, tol)
    out = []
    for z, track in zip(focus.points, tracks):
        z0 = z / np.linalg.norm(z)
        center = _chart(z, z0)
        cols, noise = [], 0.0
        for pts in track:
            vals = [_chart(p, z0) for p in pts]
            cols.append(stencil_derivative(vals, h))
            noise += stencil_noise(vals, center, h) ** 2
        if not cols:
            out.append(0)
            continue
        sv = np.linalg.svd(np.column_stack(cols), compute_uv=False)
        r, amb = gap_rank(sv, tol, floor=NOISE_FACTOR * np.sqrt(noise))
        if amb:
            raise TrackingAmbiguity("ambiguous sweep rank")
        out.append(int(r))
    return out


def _fiber_task(X, seed, index, cluster_tol, tol, retries, verify):
    last = None
    for attempt in range(retries):
        rng = sample_rng(seed, index, attempt)
        try:
            u, jets, _ = generic_sample(X, rng, retries=retries, tol=tol, order=3)
            focus, fiber = fiber_focus(X, u, cluster_tol, tol, jets=jets)
            if verify:
                verify_fiber(X, fiber, seed=int(rng.integers(2 ** 31)))
            focus.sweeps = sweep_dimension(X, focus, fiber, cluster_tol=cluster_tol, tol=tol)
            return focus, attempt
        except UnsupportedFiberDimension as exc:
            last = exc
        except GaussRankError as exc:
            last = exc
    return None, last


def focus_report(X, seed=0, fibers=10, cluster_tol=FOCUS_CLUSTER_TOL, tol=TOL_RANK,
                 retries=DEFAULT_RETRIES, verify=True):
    """Focus and sweeps on ``fibers`` generic fibers of an ``f = 1`` variety."""
    results = ordered_map(lambda k: _fiber_task(X, seed, k, cluster_tol, tol, retries, verify),
                          range(fibers))
    good = [r for r, _ in results if r is not None]
    if not good:
        err = next((e for _, e in results if isinstance(e, Exception)), None)
        if isinstance(err, GaussRankError):
            raise err
        raise UnsupportedFiberDimension(f"{X.name}: no usable fiber")
    rep = good[0]
    return FocusReport(roots=rep.roots, degree_check=rep.degree, sweeps=rep.sweeps,
                       fiber_count=len(good), fibers=good)
