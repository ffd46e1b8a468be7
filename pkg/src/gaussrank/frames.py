"""Pointwise projective differential geometry.

Tangent frames, the projective second fundamental form as a system of
quadrics on the tangent space, and the direction fields built from it
(conjugate, asymptotic and Gauss-fiber directions).

Rank decisions are made in *geometric* tangent coordinates: the lift is scaled
to unit norm and the tangent vectors, taken modulo the lift, are
orthonormalized by a QR factor ``R``.  A quadric ``Q`` in parameter
coordinates becomes ``R^{-T} Q R^{-1}`` there, which keeps tolerances
independent of how the variety happens to be parametrized.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (AmbiguousDirections, DimensionMismatch, NoCommonRoot,
                     NondegenerateQuadricNotFound, RankDrop)
from .numeric import TOL_RANK, complex_normal, gap_rank, nullspace

CLUSTER_TOL = 1e-6
CONJUGACY_TOL = 1e-8


@dataclass
class TangentFrame:
    u: np.ndarray
    lift: np.ndarray
    tangent_basis: np.ndarray  # (N+1, n), columns d_i phi
    normal_basis: np.ndarray  # (N+1, N-n), orthonormal
    R: np.ndarray  # tangent vectors mod lift, over |lift|, equal Q @ R

    @property
    def n(self):
        return self.tangent_basis.shape[1]

    def span(self):
        """Orthonormal basis of the embedded tangent space (as a linear subspace)."""
        W = np.column_stack([self.lift, self.tangent_basis])
        q, _ = np.linalg.qr(W)
        return q

    def to_geometric(self, v):
        return self.R @ v

    def from_geometric(self, w):
        return np.linalg.solve(self.R, w)


@dataclass
class SecondFundamentalForm:
    quadrics: np.ndarray  # (N-n, n, n) complex symmetric, parameter coordinates
    frame: TangentFrame = None

    @property
    def n(self):
        return self.quadrics.shape[-1]

    @property
    def count(self):
        return self.quadrics.shape[0]

    def geometric(self):
        """Quadrics in orthonormal tangent coordinates."""
        if self.frame is None:
            return self.quadrics
        Rinv = np.linalg.inv(self.frame.R)
        return _symmetrize(np.einsum("ai,mab,bj->mij", Rinv, self.quadrics, Rinv))

    def _to_param(self, w):
        if self.frame is None:
            return w
        return self.frame.from_geometric(w)

    def _to_geom(self, v):
        if self.frame is None:
            return v
        return self.frame.to_geometric(v)


@dataclass
class DirectionField:
    """A direction field on a parametrized variety, in its parameter coordinates.

    ``kind`` is ``"user"`` (with ``vector``: one expression per parameter),
    or one of ``"conjugate"``, ``"asymptotic"``, ``"gauss_fiber"`` resolved
    pointwise from the second fundamental form, picking entry ``index`` of the
    canonically ordered direction list.
    """

    kind: str
    index: int = 0
    vector: list = field(default=None)

    KINDS = ("user", "conjugate", "asymptotic", "gauss_fiber")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown direction field kind {self.kind!r}")
        if self.kind == "user" and self.vector is None:
            raise ValueError("a user direction field needs a vector")

    @classmethod
    def user(cls, vector):
        return cls("user", 0, list(vector))

    @classmethod
    def conjugate(cls, i=0):
        return cls("conjugate", i)

    @classmethod
    def asymptotic(cls, i=0):
        return cls("asymptotic", i)

    @classmethod
    def gauss_fiber(cls, i=0):
        return cls("gauss_fiber", i)

    def resolve(self, II, rng=None):
        """Direction (parameter coordinates) at the point where ``II`` was taken."""
        if self.kind == "conjugate":
            dirs = conjugate_directions(II, rng=rng)
        elif self.kind == "asymptotic":
            dirs = asymptotic_directions(II)
        elif self.kind == "gauss_fiber":
            basis = gauss_fiber_space(II)
            dirs = [canonical_direction(basis[:, k]) for k in range(basis.shape[1])]
        else:
            raise ValueError("user fields are evaluated, not resolved")
        if not 0 <= self.index < len(dirs):
            raise AmbiguousDirections(
                f"{self.kind}({self.index}) requested but only {len(dirs)} directions exist")
        return dirs[self.index]


def _symmetrize(Q):
    n = Q.shape[-1]
    iu = np.triu_indices(n)
    out = np.zeros_like(Q)
    out[..., iu[0], iu[1]] = Q[..., iu[0], iu[1]]
    out[..., iu[1], iu[0]] = Q[..., iu[0], iu[1]]
    return out


def canonical_direction(v):
    """Unit vector with its first significant component real positive."""
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    k = int(np.argmax(np.abs(v) > 1e-9 * np.max(np.abs(v))))
    return v * (abs(v[k]) / v[k])


def _direction_key(v):
    if abs(v[0]) < 1e-9:
        return (np.inf,)
    s = v[1:] / v[0]
    return tuple(x for z in s for x in (round(z.real, 9), z.imag))


def sort_directions(dirs):
    dirs = [canonical_direction(v) for v in dirs]
    return sorted(dirs, key=_direction_key)


# --------------------------------------------------------------------------


def tangent_frame(X, u, jets=None, tol=TOL_RANK):
    """Lift, tangent and normal bases at the parameter point ``u``."""
    u = np.asarray(u, dtype=complex)
    if jets is None:
        jets = X.evaluate(u, order=2)
    lift = jets.value
    norm = np.linalg.norm(lift)
    if norm == 0:
        raise RankDrop("parametrization vanishes at the sample")
    D = jets.grad
    n = D.shape[1]
    W = np.column_stack([lift, D]) / norm
    U, s, _ = np.linalg.svd(W, full_matrices=True)
    rank, ambiguous = gap_rank(s, tol)
    if rank < n + 1 or ambiguous:
        raise RankDrop(f"embedded tangent space has rank {rank - 1} < {n} at the sample")
    xh = lift / norm
    tau = (D - np.outer(xh, xh.conj() @ D)) / norm
    _, R = np.linalg.qr(tau)
    return TangentFrame(u=u, lift=lift, tangent_basis=D, normal_basis=U[:, n + 1:], R=R)


def second_fundamental_form(X, u, jets=None, frame=None, tol=TOL_RANK):
    """Normal components of the Hessian: ``Q_mu[i, j] = <nu_mu, d_i d_j phi>``."""
    if jets is None:
        jets = X.evaluate(u, order=2)
    if frame is None:
        frame = tangent_frame(X, u, jets, tol)
    norm = np.linalg.norm(frame.lift)
    Q = np.einsum("km,kij->mij", frame.normal_basis.conj(), jets.hess) / norm
    return SecondFundamentalForm(_symmetrize(Q), frame)


def kernel_dimension(II, tol=TOL_RANK):
    """``(dim joint kernel, ambiguous)`` of the quadric system."""
    n = II.n
    if II.count == 0:
        return n, False
    G = II.geometric()
    rank, ambiguous = gap_rank(np.linalg.svd(G.reshape(-1, n), compute_uv=False), tol)
    return n - rank, ambiguous


def gauss_fiber_space(II, tol=TOL_RANK):
    """Basis (columns, parameter coordinates) of ``{v : Q_mu v = 0 for all mu}``."""
    n = II.n
    dim, _ = kernel_dimension(II, tol)
    if II.count == 0:
        return np.eye(n, dtype=complex)
    K = nullspace(II.geometric().reshape(-1, n), dim)
    if dim == 0:
        return K
    B = np.column_stack([II._to_param(K[:, k]) for k in range(dim)])
    q, _ = np.linalg.qr(B)
    return q


def conjugacy_check(II, v, w):
    """``max_mu |v^T Q_mu w| / (|v| |w| |Q_mu|)``; zero quadrics contribute 0."""
    v = np.asarray(v, dtype=complex)
    w = np.asarray(w, dtype=complex)
    nv, nw = np.linalg.norm(v), np.linalg.norm(w)
    worst = 0.0
    for Q in II.quadrics:
        nq = np.linalg.norm(Q)
        if nq == 0 or nv == 0 or nw == 0:
            continue
        worst = max(worst, abs(v @ Q @ w) / (nv * nw * nq))
    return float(worst)


def conjugate_directions(II, rng=None, cluster_tol=CLUSTER_TOL, conjugacy_tol=CONJUGACY_TOL,
                         tries=10):
    """Simultaneous eigen-directions of the quadric pencil, canonically ordered.

    A random nondegenerate combination ``Q0`` identifies ``T`` with ``T*``;
    the directions are the eigenvectors of ``Q0^{-1} Q1`` for a second random
    combination ``Q1``.  They are returned only if the eigenvalues are
    separated and every pair is conjugate for every quadric.
    """
    if II.count < 2:
        raise AmbiguousDirections("a pencil needs at least two quadrics")
    rng = np.random.default_rng(0) if rng is None else rng
    G = II.geometric()
    G = G / max(np.linalg.norm(G), 1e-300)
    n = II.n
    Q0 = None
    for _ in range(tries):
        a = complex_normal(rng, II.count)
        cand = np.tensordot(a, G, 1)
        s = np.linalg.svd(cand, compute_uv=False)
        if s[-1] > 1e-8 * s[0]:
            Q0 = cand
            break
    if Q0 is None:
        raise NondegenerateQuadricNotFound("no nondegenerate quadric in the system")
    Q1 = np.tensordot(complex_normal(rng, II.count), G, 1)
    lam, V = np.linalg.eig(np.linalg.solve(Q0, Q1))
    scale = max(1.0, np.max(np.abs(lam)))
    for i in range(n):
        for j in range(i + 1, n):
            if abs(lam[i] - lam[j]) <= cluster_tol * scale:
                raise AmbiguousDirections("eigenvalues of the pencil cluster")
    geo = SecondFundamentalForm(G)
    for i in range(n):
        for j in range(i + 1, n):
            if conjugacy_check(geo, V[:, i], V[:, j]) > conjugacy_tol:
                raise AmbiguousDirections("eigen-directions are not simultaneous")
    return sort_directions([II._to_param(V[:, i]) for i in range(n)])


def _binary_roots(q):
    """Projective roots ``v`` of ``q00 v0^2 + 2 q01 v0 v1 + q11 v1^2``."""
    a, b, c = q[1, 1], 2 * q[0, 1], q[0, 0]
    scale = max(abs(a), abs(b), abs(c))
    if scale == 0:
        raise AmbiguousDirections("zero quadric: every direction is asymptotic")
    if abs(a) <= 1e-12 * scale:
        roots = [np.array([0, 1], complex)]
        if abs(b) > 1e-12 * scale:
            roots.append(np.array([1, -c / b], complex))
        else:
            roots.append(np.array([0, 1], complex))
        return roots
    return [np.array([1, lam], complex) for lam in np.roots([a, b, c])]


def _resultant(q, p):
    a = [q[0, 0], 2 * q[0, 1], q[1, 1]]
    b = [p[0, 0], 2 * p[0, 1], p[1, 1]]
    a = np.array(a) / np.linalg.norm(a)
    b = np.array(b) / np.linalg.norm(b)
    S = np.array([[a[0], a[1], a[2], 0], [0, a[0], a[1], a[2]],
                  [b[0], b[1], b[2], 0], [0, b[0], b[1], b[2]]])
    return np.linalg.det(S)


def asymptotic_directions(II, tol=1e-8):
    """Directions ``v`` with ``II(v, v) = 0`` for every quadric (surfaces only)."""
    if II.n != 2:
        raise DimensionMismatch("asymptotic directions are supported for n = 2 only")
    G = II.geometric()
    nonzero = [q for q in G if np.linalg.norm(q) > 0]
    if not nonzero:
        raise AmbiguousDirections("zero second fundamental form")
    for p in nonzero[1:]:
        if abs(_resultant(nonzero[0], p)) > tol:
            raise NoCommonRoot("the quadrics have no common root")
    roots = _binary_roots(nonzero[0] / np.linalg.norm(nonzero[0]))
    keep = []
    for r in roots:
        rr = r / np.linalg.norm(r)
        if all(abs(rr @ q @ rr) / np.linalg.norm(q) < 1e-6 for q in nonzero):
            keep.append(II._to_param(r))
    if not keep:
        raise NoCommonRoot("the quadrics have no common root")
    return sort_directions(keep)
