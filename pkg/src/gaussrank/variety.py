"""Parametrized projective varieties and the constructors that produce
varieties with degenerate Gauss maps.

Most varieties are *polynomial*: their homogeneous coordinates are expression
DAGs, so symbolic derivatives are available and constructors compose freely.
``line_union`` along a conjugate, asymptotic or Gauss-fiber field is the
exception; its direction field is resolved pointwise and only jets of the
result are available.
"""

import numpy as np

from . import expr as E
from .errors import (DimensionMismatch, FrameDependence, GaussRankError, NonGeneric,
                     RankDrop)
from .frames import SecondFundamentalForm
from .jets import (Jet3, jet_affine_pullback, jet_concat, jet_linear, jet_newton,
                   seed_variable)
from .numeric import TOL_RANK, complex_normal, gap_rank, projective_distance

DEFAULT_RETRIES = 5


class ParametrizedVariety:
    """A map from ``C^n`` to homogeneous coordinates of ``P^N``."""

    def __init__(self, name, n, N, coords=None, evaluator=None, provenance=None):
        if coords is None and evaluator is None:
            raise ValueError("need coordinates or an evaluator")
        if coords is not None:
            coords = tuple(E.as_expr(c) for c in coords)
            if len(coords) != N + 1:
                raise DimensionMismatch(f"{name}: expected {N + 1} coordinates, got {len(coords)}")
            if all(c.is_const and c.value == 0 for c in coords):
                raise ValueError(f"{name}: coordinates are identically zero")
            if E.max_param(coords) >= n:
                raise DimensionMismatch(f"{name}: coordinates use more than {n} parameters")
        self.name = name
        self.n = int(n)
        self.N = int(N)
        self.coords = coords
        self._evaluator = evaluator
        self.provenance = provenance or {"op": "polynomial"}
        self._program = None

    def __repr__(self):
        return f"ParametrizedVariety({self.name!r}, n={self.n}, N={self.N})"

    @property
    def is_polynomial(self):
        return self.coords is not None

    @property
    def program(self):
        if self._program is None:
            self._program = E.Program(self.coords, self.n)
        return self._program

    def evaluate(self, u, order=3):
        """Jets of the ``N + 1`` coordinates at ``u`` (a batched :class:`Jet3`)."""
        u = np.asarray(u, dtype=complex).reshape(-1)
        if u.shape[0] != self.n:
            raise DimensionMismatch(f"{self.name}: expected {self.n} parameters")
        if self.coords is not None:
            return self.program.run(u, order)
        return self._evaluator(u, order)

    def values(self, u):
        return self.evaluate(u, order=0).value

    def derivative_coords(self):
        """Symbolic ``[d_i phi]`` for polynomial varieties."""
        _require_polynomial(self, "symbolic derivatives")
        return E.gradient(list(self.coords), self.n)


def _require_polynomial(X, what):
    if not X.is_polynomial:
        raise TypeError(f"{what} needs a polynomial parametrization; {X.name} is pointwise")


class FrameField:
    """``k`` vector fields along a variety, each with ``N + 1`` expression components."""

    def __init__(self, owner, vectors):
        vectors = [tuple(E.as_expr(c) for c in v) for v in vectors]
        for v in vectors:
            if len(v) != owner.N + 1:
                raise DimensionMismatch("frame vectors need N + 1 components")
            if E.max_param(v) >= owner.n:
                raise DimensionMismatch("frame vectors use more parameters than the owner has")
        self.owner = owner
        self.vectors = vectors

    @property
    def k(self):
        return len(self.vectors)


# --------------------------------------------------------------------------
# leaves


def polynomial_variety(name, coords, n=None):
    """Variety from coordinate polynomials given as ``[[(exps, coeff), ...], ...]``."""
    exprs = [c if isinstance(c, E.Expr) else E.monomial_poly(c) for c in coords]
    if n is None:
        n = E.max_param(exprs) + 1
    return ParametrizedVariety(name, n, len(exprs) - 1, exprs)


def linear_space(points, name=None):
    """The span of the given points: ``p0 + sum a_i p_i``."""
    P = np.atleast_2d(np.asarray(points, dtype=complex))
    k = P.shape[0] - 1
    coords = [E.esum([E.const(P[0, c])] + [E.scale(E.param(i), P[i + 1, c]) for i in range(k)])
              for c in range(P.shape[1])]
    return ParametrizedVariety(name or f"P{k}", k, P.shape[1] - 1, coords,
                               provenance={"op": "linear", "points": P.shape[0]})


def rational_normal_curve(N, name=None):
    t = E.param(0)
    return ParametrizedVariety(name or f"rational normal curve in P{N}", 1, N,
                               [t ** d for d in range(N + 1)])


def random_polynomial_variety(rng, m, N, degree, name=None):
    """Random ``m``-fold in ``P^N`` with coordinates of degree ``<= degree``."""
    exps = [e for e in _exponents(m, degree)]
    coords = []
    for _ in range(N + 1):
        coeffs = complex_normal(rng, len(exps))
        coords.append(E.monomial_poly(list(zip(exps, coeffs))))
    return ParametrizedVariety(name or f"random {m}-fold deg {degree} in P{N}", m, N, coords)


def _exponents(m, degree):
    if m == 0:
        yield ()
        return
    for d in range(degree + 1):
        for rest in _exponents(m - 1, degree - d):
            yield (d,) + rest


# --------------------------------------------------------------------------
# joins


def join(Ys, name=None, op="join"):
    """``phi_1(u_1) + sum_{j>=2} t_{j-1} phi_j(u_j)`` with independent parameter blocks."""
    Ys = list(Ys)
    if len(Ys) < 2:
        raise ValueError("a join needs at least two varieties")
    N = Ys[0].N
    if any(Y.N != N for Y in Ys):
        raise DimensionMismatch("join factors live in different projective spaces")
    for Y in Ys:
        _require_polynomial(Y, "join")
    blocks = []
    offset = 0
    shifted = []
    for Y in Ys:
        blocks.append([offset, Y.n])
        shifted.append(E.substitute(list(Y.coords), [E.param(offset + i) for i in range(Y.n)]))
        offset += Y.n
    k = len(Ys)
    t_block = [offset, k - 1]
    coords = []
    for c in range(N + 1):
        terms = [shifted[0][c]]
        for j in range(1, k):
            terms.append(E.param(offset + j - 1) * shifted[j][c])
        coords.append(E.esum(terms))
    prov = {"op": op, "args": [Y.provenance for Y in Ys], "blocks": blocks, "t_block": t_block}
    return ParametrizedVariety(name or f"S({', '.join(Y.name for Y in Ys)})",
                               offset + k - 1, N, coords, provenance=prov)


def cone(Y, vertex, name=None):
    """Cone over ``Y`` with vertex the span of the given points."""
    L = linear_space(vertex, name="vertex")
    if L.N != Y.N:
        raise DimensionMismatch("vertex points live in a different projective space")
    return join([Y, L], name=name or f"cone({Y.name})", op="cone")


def secant_variety(Y, k=2, name=None):
    if k < 2:
        raise ValueError("secant varieties need k >= 2")
    return join([Y] * k, name=name or f"Sec_{k}({Y.name})", op="secant")


# --------------------------------------------------------------------------
# tangent-line constructions


def tangential_variety(Y, name=None):
    """``phi(u) + sum_i v_i d_i phi(u)``."""
    _require_polynomial(Y, "tangential_variety")
    m = Y.n
    d = Y.derivative_coords()
    coords = [E.esum([Y.coords[c]] + [E.param(m + i) * d[i][c] for i in range(m)])
              for c in range(Y.N + 1)]
    return ParametrizedVariety(name or f"tau({Y.name})", 2 * m, Y.N, coords,
                               provenance={"op": "tangential", "args": [Y.provenance]})


def osculating_variety(Y, order=2, name=None):
    """``phi + sum v_i d_i phi + sum_{i<=j} w_ij d_i d_j phi``."""
    if order != 2:
        raise ValueError("only order-2 osculating varieties are supported")
    _require_polynomial(Y, "osculating_variety")
    m = Y.n
    d = Y.derivative_coords()
    pairs = [(i, j) for i in range(m) for j in range(i, m)]
    dd = {(i, j): E.diff(d[i], j) for i, j in pairs}
    coords = []
    for c in range(Y.N + 1):
        terms = [Y.coords[c]]
        terms += [E.param(m + i) * d[i][c] for i in range(m)]
        terms += [E.param(2 * m + k) * dd[p][c] for k, p in enumerate(pairs)]
        coords.append(E.esum(terms))
    return ParametrizedVariety(name or f"Osc2({Y.name})", 2 * m + len(pairs), Y.N, coords,
                               provenance={"op": "osculating", "order": 2,
                                           "args": [Y.provenance]})


def _check_rank(rows_fn, X, want, rng, retries, err, what):
    for _ in range(retries):
        u = complex_normal(rng, X.n)
        M = np.asarray(rows_fn(u))
        norms = np.linalg.norm(M, axis=1, keepdims=True)
        M = M / np.where(norms > 0, norms, 1.0)
        rank, amb = gap_rank(np.linalg.svd(M, compute_uv=False))
        if rank >= want and not amb:
            return
    raise err(f"{what} at all {retries} retry samples")


def plane_band(C, frame, name=None, seed=0, retries=DEFAULT_RETRIES):
    """Union of the planes spanned by ``phi(t)``, ``phi'(t)`` and ``g(t)``."""
    _require_polynomial(C, "plane_band")
    if C.n != 1:
        raise DimensionMismatch("plane_band needs a curve")
    if isinstance(frame, FrameField):
        if frame.k != 1:
            raise ValueError("plane_band takes a frame with exactly one vector")
        g = frame.vectors[0]
    else:
        g = tuple(E.as_expr(c) for c in frame)
    if len(g) != C.N + 1:
        raise DimensionMismatch("frame vector has the wrong length")
    d1 = E.diff(list(C.coords), 0)
    d2 = E.diff(d1, 0)
    rng = np.random.default_rng(seed)
    prog = E.Program(list(C.coords) + d1 + d2 + list(g), 1)
    N1 = C.N + 1

    def rows(u):
        v = prog.values(u)
        return [v[:N1], v[N1:2 * N1], v[2 * N1:3 * N1]]

    def frame_rows(u):
        v = prog.values(u)
        return [v[:N1], v[N1:2 * N1], v[3 * N1:]]

    _check_rank(rows, C, 3, rng, retries, RankDrop, "the curve is a line (phi, phi', phi'' dependent)")
    _check_rank(frame_rows, C, 3, rng, retries, FrameDependence, "phi, phi', g are dependent")
    a, b = E.param(1), E.param(2)
    coords = [E.esum([C.coords[c], a * d1[c], b * g[c]]) for c in range(N1)]
    return ParametrizedVariety(name or f"plane_band({C.name})", 3, C.N, coords,
                               provenance={"op": "plane_band", "args": [C.provenance]})


def dual_variety(S, name=None, seed=0, retries=DEFAULT_RETRIES):
    """Hyperplanes containing the embedded tangent spaces of ``S``.

    The annihilator of ``span{phi, d phi}`` is spanned by cofactor vectors of
    ``[phi; d phi; c_1; ...]`` for random constant rows ``c``; these are
    polynomial, so the dual is again a polynomial variety.  Output:
    ``h_1(y) + sum_j s_j h_{j+1}(y)`` in dual coordinates.
    """
    _require_polynomial(S, "dual_variety")
    m, N = S.n, S.N
    extra = N - m - 1
    if extra < 0:
        raise DimensionMismatch("dual_variety needs N - m - 1 >= 0")
    rng = np.random.default_rng(seed)
    base = [list(S.coords)] + [list(r) for r in S.derivative_coords()]
    hs = []
    for _ in range(N - m):
        consts = [[E.const(z) for z in complex_normal(rng, N + 1)] for _ in range(extra)]
        hs.append(E.cofactor_vector(base + consts))
    prog = E.Program([c for h in hs for c in h], m)

    def ann_rows(u):
        v = prog.values(u)
        return v.reshape(N - m, N + 1)

    _check_rank(ann_rows, S, N - m, rng, retries, RankDrop, "annihilator rank drop")
    coords = [E.esum([hs[0][c]] + [E.param(m + j) * hs[j + 1][c] for j in range(extra)])
              for c in range(N + 1)]
    return ParametrizedVariety(name or f"dual({S.name})", m + extra, N, coords,
                               provenance={"op": "dual", "args": [S.provenance]})


def hyperband(Y, frame, name=None, seed=0, retries=DEFAULT_RETRIES):
    """Hypersurface enveloped by the band of hyperplanes ``span{phi, d phi, g_1..g_k}``.

    ``frame`` must carry ``k = N - m - 1`` vectors.  The band is the
    ``m``-dimensional family of hyperplanes; the hyperband is its dual, a
    hypersurface swept by ``k``-planes along which the tangent hyperplane is
    constant.
    """
    _require_polynomial(Y, "hyperband")
    m, N = Y.n, Y.N
    k = N - m - 1
    if k < 1:
        raise DimensionMismatch("hyperband needs N - m - 1 >= 1")
    if frame.k != k:
        raise ValueError(f"hyperband over a {m}-fold in P{N} needs {k} frame vectors")
    rows = [list(Y.coords)] + [list(r) for r in Y.derivative_coords()] + [list(g) for g in frame.vectors]
    prog = E.Program([c for r in rows for c in r], m)
    rng = np.random.default_rng(seed)
    _check_rank(lambda u: prog.values(u).reshape(N, N + 1), Y, N, rng, retries,
                FrameDependence, "frame vectors are dependent on the tangent space")
    eta = E.cofactor_vector(rows)
    band = ParametrizedVariety(f"band({Y.name})", m, N, eta,
                               provenance={"op": "band", "args": [Y.provenance]})
    X = dual_variety(band, name=name or f"hyperband({Y.name})", seed=seed, retries=retries)
    X.provenance = {"op": "hyperband", "args": [Y.provenance], "k": k}
    return X


def line_union(Y, field, name=None, seed=0):
    """Union of the lines ``phi(u) + t v(u)``, ``v = sum_a field^a(u) d_a phi``."""
    _require_polynomial(Y, "line_union")
    m, N = Y.n, Y.N
    n = m + 1
    d = Y.derivative_coords()
    t = E.param(m)
    prov = {"op": "line_union", "field": field.kind, "index": field.index,
            "args": [Y.provenance]}
    label = name or f"lines({Y.name}, {field.kind}{'' if field.kind == 'user' else field.index})"
    if field.kind == "user":
        vec = [E.as_expr(c) for c in field.vector]
        if len(vec) != m:
            raise DimensionMismatch("user direction needs one component per parameter")
        coords = [E.esum([Y.coords[c], t * E.esum(vec[a] * d[a][c] for a in range(m))])
                  for c in range(N + 1)]
        return ParametrizedVariety(label, n, N, coords, provenance=prov)
    resolver = _FieldLines(Y, field, seed)
    return ParametrizedVariety(label, n, N, evaluator=resolver, provenance=prov)


class _FieldLines:
    """Pointwise evaluator for ``line_union`` along a resolved direction field.

    Quadrics of the second fundamental form are taken against cofactor
    covectors that annihilate the tangent space; they are polynomial in ``u``
    so their jets are exact.  The direction is resolved numerically and lifted
    to jets by frozen-Jacobian Newton steps on its defining equations.
    """

    def __init__(self, Y, field, seed):
        m, N = Y.n, Y.N
        if N - m < 1:
            raise DimensionMismatch("line_union needs positive codimension")
        rng = np.random.default_rng(seed)
        self.m, self.N, self.field = m, N, field
        d = Y.derivative_coords()
        dd = [[E.diff(d[a], b) for b in range(m)] for a in range(m)]
        base = [list(Y.coords)] + [list(r) for r in d]
        extra = N - m - 1
        covectors = []
        for _ in range(N - m):
            consts = [[E.const(z) for z in complex_normal(rng, N + 1)] for _ in range(extra)]
            covectors.append(E.cofactor_vector(base + consts))
        quad = [E.esum(h[c] * dd[a][b][c] for c in range(N + 1))
                for h in covectors for a in range(m) for b in range(m)]
        outputs = list(Y.coords) + [c for r in d for c in r] + quad
        self.prog = E.Program(outputs, m + 1)
        self.k = N - m
        self.normal = complex_normal(rng, m)
        self.combos = complex_normal(rng, (2, self.k))
        self.rng_seed = seed

    def __call__(self, u, order):
        m, N, k = self.m, self.N, self.k
        n = m + 1
        jets = self.prog.run(u, max(order, 1) if order < 3 else 3)
        N1 = N + 1
        phi = jets[slice(0, N1)]
        dphi = jets[slice(N1, N1 + m * N1)].reshape((m, N1))
        Q = jets[slice(N1 + m * N1, None)].reshape((k, m, m))
        II = SecondFundamentalForm(Q.value)
        v0 = self.field.resolve(II, rng=np.random.default_rng(self.rng_seed))
        c = self.normal
        v0 = v0 / (c @ v0)
        x0, residual, J = self._system(Q, v0)
        x = jet_newton(residual, x0, J)
        v = x[slice(0, m)]
        t = seed_variable(m, u[m], n)
        lines = (v.reshape((m, 1)) * dphi).sum(axis=0)
        return (phi + t * lines).truncate(order)

    def _system(self, Q, v0):
        m, k = self.m, self.k
        n = m + 1
        c = self.normal
        Qv = Q.value
        kind = self.field.kind
        if kind == "conjugate":
            Q0 = jet_linear(self.combos[0], Q)
            Q1 = jet_linear(self.combos[1], Q)
            A0, A1 = Q0.value, Q1.value
            w = A0 @ v0
            lam0 = np.vdot(w, A1 @ v0) / np.vdot(w, w)
            x0 = Jet3.constant(np.concatenate([v0, [lam0]]), n)

            def residual(x):
                v = x[slice(0, m)].reshape((1, m))
                lam = x[m]
                M = Q1 - Q0 * lam
                eqs = (M * v).sum(axis=1)
                norm = (v.reshape((m,)) * c).sum(axis=0) - 1.0
                return jet_concat([eqs, norm])

            J = np.zeros((m + 1, m + 1), complex)
            J[:m, :m] = A1 - lam0 * A0
            J[:m, m] = -(A0 @ v0)
            J[m, :m] = c
            return x0, residual, J
        x0 = Jet3.constant(v0, n)
        if kind == "asymptotic":
            def residual(x):
                v = x.reshape((1, 1, m))
                Qv_ = (Q * v).sum(axis=2)
                eqs = (Qv_ * x.reshape((1, m))).sum(axis=1)
                norm = (x * c).sum(axis=0) - 1.0
                return jet_concat([eqs, norm])

            J = np.vstack([2 * (Qv @ v0), c[None, :]])
            return x0, residual, J

        def residual(x):
            v = x.reshape((1, 1, m))
            eqs = (Q * v).sum(axis=2).reshape((k * m,))
            norm = (x * c).sum(axis=0) - 1.0
            return jet_concat([eqs, norm])

        J = np.vstack([Qv.reshape(k * m, m), c[None, :]])
        return x0, residual, J


# --------------------------------------------------------------------------
# transformations


def projective_transform(X, M, name=None):
    """Apply the invertible ``(N+1) x (N+1)`` matrix ``M`` to coordinates."""
    M = np.asarray(M, dtype=complex)
    if M.shape != (X.N + 1, X.N + 1):
        raise DimensionMismatch("transformation matrix has the wrong size")
    label = name or f"{X.name}^M"
    prov = dict(X.provenance)
    if X.is_polynomial:
        coords = [E.dot(M[r], X.coords) for r in range(X.N + 1)]
        return ParametrizedVariety(label, X.n, X.N, coords, provenance=prov)
    return ParametrizedVariety(label, X.n, X.N,
                               evaluator=lambda u, order: jet_linear(M, X.evaluate(u, order)),
                               provenance=prov)


def reparametrize(X, A, b=None, name=None):
    """Precompose with the affine map ``w -> A w + b``."""
    A = np.asarray(A, dtype=complex)
    b = np.zeros(X.n, complex) if b is None else np.asarray(b, dtype=complex)
    if A.shape != (X.n, X.n):
        raise DimensionMismatch("reparametrization matrix has the wrong size")
    label = name or f"{X.name}∘A"
    prov = dict(X.provenance)
    if "blocks" in prov and not np.allclose(A, np.diag(np.diag(A))):
        prov = {k: v for k, v in prov.items() if k not in ("blocks", "t_block")}
    if X.is_polynomial:
        mapping = [E.esum([E.const(b[i])] + [E.scale(E.param(j), A[i, j]) for j in range(X.n)])
                   for i in range(X.n)]
        coords = E.substitute(list(X.coords), mapping)
        return ParametrizedVariety(label, X.n, X.N, coords, provenance=prov)

    def evaluator(w, order):
        return jet_affine_pullback(X.evaluate(A @ w + b, order), A)

    return ParametrizedVariety(label, X.n, X.N, evaluator=evaluator, provenance=prov)


# --------------------------------------------------------------------------
# sampling


def tangent_rank(X, u, jets=None, tol=TOL_RANK):
    """``(rank of the projectivized differential, ambiguous)`` at ``u``."""
    if jets is None:
        jets = X.evaluate(u, order=1)
    lift = jets.value
    norm = np.linalg.norm(lift)
    if norm == 0:
        return -1, True
    W = np.column_stack([lift, jets.grad]) / norm
    rank, amb = gap_rank(np.linalg.svd(W, compute_uv=False), tol)
    return rank - 1, amb


def generic_sample(X, rng, retries=DEFAULT_RETRIES, tol=TOL_RANK, order=3):
    """Draw parameters until the parametrization is immersive there.

    Returns ``(u, jets, attempts)``; raises :class:`NonGeneric` after
    ``retries`` failed draws.
    """
    for attempt in range(1, retries + 1):
        u = complex_normal(rng, X.n)
        try:
            jets = X.evaluate(u, order)
        except (ArithmeticError, np.linalg.LinAlgError, GaussRankError):
            continue  # resolver failures at special points
        if not np.all(np.isfinite(jets.value)):
            continue
        rank, amb = tangent_rank(X, u, jets, tol)
        if rank == X.n and not amb:
            return u, jets, attempt
    raise NonGeneric(f"{X.name}: not immersive at {retries} random samples")


def effective_dimension(X, seed=0, samples=5, tol=TOL_RANK):
    """Most common rank of the projectivized differential at random points."""
    rng = np.random.default_rng(seed)
    ranks = []
    for _ in range(samples):
        u = complex_normal(rng, X.n)
        r, amb = tangent_rank(X, u, tol=tol)
        if not amb:
            ranks.append(r)
    if not ranks:
        raise NonGeneric(f"{X.name}: every sample was ambiguous")
    vals, counts = np.unique(ranks, return_counts=True)
    return int(vals[np.argmax(counts)])


def locate(X, target, u0=None, rng=None, starts=8, iterations=60):
    """Parameters whose image is closest (projectively) to ``target``.

    Gauss-Newton on ``psi(u) - lam * target`` from ``u0`` and/or random
    starts.  Returns ``(u, distance)`` with the sine distance of the lines.
    """
    target = np.asarray(target, dtype=complex)
    target = target / np.linalg.norm(target)
    rng = np.random.default_rng(0) if rng is None else rng
    inits = [] if u0 is None else [np.asarray(u0, dtype=complex)]
    inits += [complex_normal(rng, X.n) for _ in range(starts if u0 is None else max(0, starts - 1))]
    best = (None, np.inf)
    for u in inits:
        u, dist = _gauss_newton(X, target, u, iterations)
        if dist < best[1]:
            best = (u, dist)
        if dist < 1e-12:
            break
    return best


def _gauss_newton(X, target, u, iterations):
    u = u.copy()
    dist = np.inf
    for _ in range(iterations):
        try:
            j = X.evaluate(u, order=1)
        except Exception:
            break
        psi = j.value
        scale = np.linalg.norm(psi)
        if scale == 0 or not np.isfinite(scale):
            break
        lam = np.vdot(target, psi)
        r = (psi - lam * target) / scale
        dist = projective_distance(psi, target)
        if dist < 1e-14:
            break
        Jm = np.column_stack([j.grad, -target]) / scale
        step, *_ = np.linalg.lstsq(Jm, -r, rcond=None)
        u = u + step[:X.n]
    j = X.evaluate(u, order=0)
    return u, projective_distance(j.value, target)


def point_membership(X, point, u0=None, rng=None):
    """Projective distance from ``point`` to the image of ``X``."""
    return locate(X, point, u0=u0, rng=rng)[1]
