"""Order-3 truncated Taylor arithmetic over complex scalars.

A :class:`Jet3` carries a value together with its gradient, Hessian and third
derivative tensor with respect to ``n`` parameters.  Jets may be batched: the
value then has some shape ``S`` and the derivative parts have shape
``S + (n,)``, ``S + (n, n)`` and ``S + (n, n, n)``.  A coordinate vector of a
parametrized variety is a batch of shape ``(N + 1,)``.

Symmetric parts are canonicalized on write (every permuted entry is a copy of
the sorted-index entry), so symmetry holds bit-for-bit.
"""

import numbers

import numpy as np

from ._kernels import canon_index2, canon_index3


class JetError(ValueError):
    pass


def _canon(hess, third):
    n = hess.shape[-1]
    S = hess.shape[:-2]
    hess = hess.reshape(S + (n * n,))[..., canon_index2(n)].reshape(S + (n, n))
    third = third.reshape(S + (n ** 3,))[..., canon_index3(n)].reshape(S + (n, n, n))
    return hess, third


class Jet3:
    __slots__ = ("value", "grad", "hess", "third")

    def __init__(self, value, grad, hess, third, *, canonical=False):
        self.value = np.asarray(value, dtype=np.complex128)
        self.grad = np.asarray(grad, dtype=np.complex128)
        hess = np.asarray(hess, dtype=np.complex128)
        third = np.asarray(third, dtype=np.complex128)
        if not canonical:
            hess, third = _canon(hess, third)
        self.hess = hess
        self.third = third

    # -- construction -----------------------------------------------------
    @classmethod
    def constant(cls, value, n):
        value = np.asarray(value, dtype=np.complex128)
        S = value.shape
        z = np.zeros
        return cls(value, z(S + (n,), complex), z(S + (n, n), complex),
                   z(S + (n, n, n), complex), canonical=True)

    @classmethod
    def from_packed(cls, rows, n):
        """Unpack kernel rows (..., 1 + n + n^2 + n^3) into a batched jet."""
        rows = np.asarray(rows)
        S = rows.shape[:-1]
        h0, t0 = 1 + n, 1 + n + n * n
        return cls(rows[..., 0], rows[..., 1:h0], rows[..., h0:t0].reshape(S + (n, n)),
                   rows[..., t0:].reshape(S + (n, n, n)), canonical=True)

    # -- shape ------------------------------------------------------------
    @property
    def n(self):
        return self.grad.shape[-1]

    @property
    def shape(self):
        return self.value.shape

    def __len__(self):
        return self.value.shape[0]

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def __getitem__(self, key):
        if not isinstance(key, tuple):
            key = (key,)
        return Jet3(self.value[key], self.grad[key], self.hess[key], self.third[key],
                    canonical=True)

    def __repr__(self):
        return f"Jet3(n={self.n}, shape={self.shape}, value={self.value!r})"

    def truncate(self, order):
        """Zero out derivative parts above ``order``."""
        g = self.grad if order >= 1 else np.zeros_like(self.grad)
        h = self.hess if order >= 2 else np.zeros_like(self.hess)
        t = self.third if order >= 3 else np.zeros_like(self.third)
        return Jet3(self.value, g, h, t, canonical=True)

    def shift(self, i):
        """Jet of the partial derivative along parameter ``i``, one order lower.

        The returned jet is exact to order 2; its third part is zero.
        """
        return Jet3(self.grad[..., i], self.hess[..., i, :], self.third[..., i, :, :],
                    np.zeros(self.third.shape, complex), canonical=True)

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Jet3):
            if other.n != self.n:
                raise JetError(f"parameter count mismatch: {self.n} vs {other.n}")
            return other
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return Jet3(self.value + other, self.grad, self.hess, self.third,
                        canonical=True)
        return Jet3(self.value + o.value, self.grad + o.grad, self.hess + o.hess,
                    self.third + o.third, canonical=True)

    __radd__ = __add__

    def __neg__(self):
        return Jet3(-self.value, -self.grad, -self.hess, -self.third, canonical=True)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            c = np.asarray(other, dtype=np.complex128)
            return Jet3(self.value * c, self.grad * c[..., None],
                        self.hess * c[..., None, None], self.third * c[..., None, None, None],
                        canonical=True)
        return _mul(self, o)

    __rmul__ = __mul__

    def __pow__(self, e):
        if not isinstance(e, numbers.Integral) or e < 0:
            raise JetError("jet_pow supports nonnegative integer exponents only")
        result = Jet3.constant(np.ones(self.shape, complex), self.n)
        base = self
        e = int(e)
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def reshape(self, shape):
        """Reshape the batch part."""
        shape = tuple(shape)
        n = self.n
        return Jet3(self.value.reshape(shape), self.grad.reshape(shape + (n,)),
                    self.hess.reshape(shape + (n, n)), self.third.reshape(shape + (n, n, n)),
                    canonical=True)

    def sum(self, axis=0):
        nb = self.value.ndim
        if axis < 0:
            axis += nb
        if not 0 <= axis < nb:
            raise JetError("can only sum over batch axes")
        return Jet3(self.value.sum(axis), self.grad.sum(axis), self.hess.sum(axis),
                    self.third.sum(axis), canonical=True)

    def is_symmetric(self):
        """Exact symmetry of the Hessian and third-order parts."""
        t = self.third
        return (np.array_equal(self.hess, np.swapaxes(self.hess, -1, -2))
                and np.array_equal(t, np.swapaxes(t, -1, -2))
                and np.array_equal(t, np.swapaxes(t, -2, -3)))


def _mul(a, b):
    a0, b0 = a.value, b.value
    ga, gb = a.grad, b.grad
    Ha, Hb = a.hess, b.hess
    value = a0 * b0
    grad = a0[..., None] * gb + b0[..., None] * ga
    hess = (a0[..., None, None] * Hb + b0[..., None, None] * Ha
            + ga[..., :, None] * gb[..., None, :] + gb[..., :, None] * ga[..., None, :])
    third = (a0[..., None, None, None] * b.third + b0[..., None, None, None] * a.third
             + _sym3(ga, Hb) + _sym3(gb, Ha))
    return Jet3(value, grad, hess, third)


def _sym3(g, H):
    return (g[..., :, None, None] * H[..., None, :, :]
            + g[..., None, :, None] * H[..., :, None, :]
            + g[..., None, None, :] * H[..., :, :, None])


# -- functional spellings ----------------------------------------------------

def seed_variable(i, value, n):
    """Jet of the ``i``-th coordinate function evaluated at ``value``."""
    if not 0 <= i < n:
        raise JetError(f"parameter index {i} out of range for n={n}")
    j = Jet3.constant(value, n)
    j.grad[i] = 1.0
    return j


def seed_point(u):
    """Jets of all coordinate functions at the point ``u`` (batch shape ``(n,)``)."""
    u = np.asarray(u, dtype=np.complex128)
    n = u.shape[0]
    j = Jet3.constant(u, n)
    j.grad[...] = np.eye(n)
    return j


def jet_add(a, b):
    return a + b


def jet_mul(a, b):
    return a * b


def jet_scale(a, c):
    return a * c


def jet_pow(a, e):
    return a ** e


def jet_stack(jets):
    jets = list(jets)
    return Jet3(np.stack([j.value for j in jets]), np.stack([j.grad for j in jets]),
                np.stack([j.hess for j in jets]), np.stack([j.third for j in jets]),
                canonical=True)


def jet_concat(jets):
    """Concatenate 1-D batched jets (scalars count as length one)."""
    jets = [j.reshape((1,)) if j.value.ndim == 0 else j for j in jets]
    return Jet3(np.concatenate([j.value for j in jets]), np.concatenate([j.grad for j in jets]),
                np.concatenate([j.hess for j in jets]), np.concatenate([j.third for j in jets]),
                canonical=True)


def jet_affine_pullback(x, A):
    """Jets of ``f(A w + b)`` in ``w`` from jets ``x`` of ``f`` at ``A w + b``."""
    A = np.asarray(A, dtype=np.complex128)
    g = x.grad @ A
    h = np.einsum("...ij,ia,jb->...ab", x.hess, A, A)
    t = np.einsum("...ijk,ia,jb,kc->...abc", x.third, A, A, A)
    return Jet3(x.value, g, h, t)


def jet_linear(M, x):
    """Apply the constant matrix ``M`` along the leading batch axis of ``x``."""
    M = np.asarray(M, dtype=np.complex128)
    td = lambda arr: np.tensordot(M, arr, axes=([M.ndim - 1], [0]))
    return Jet3(td(x.value), td(x.grad), td(x.hess), td(x.third), canonical=True)


def jet_newton(residual, x0, jacobian, iterations=4):
    """Lift a numerical root to jets of an implicitly defined function.

    ``residual(x)`` maps a batched jet ``x`` (shape ``(k,)``) to a batched jet
    of residuals whose value part vanishes at ``x0``; ``jacobian`` is the
    numerical Jacobian of the residual with respect to ``x`` at ``x0``.
    Each frozen-Jacobian step gains one order, so four steps saturate order 3.
    """
    J = np.asarray(jacobian, dtype=np.complex128)
    solve = np.linalg.pinv(J)
    x = x0
    for _ in range(iterations):
        x = x - jet_linear(solve, residual(x))
    return x


def finite_difference_check(expr, u, h=1e-4):
    """Max relative disagreement between jets and central finite differences.

    ``expr`` is an :class:`~gaussrank.expr.Expr`, a list of them, or a
    callable ``f(u) -> array`` paired with jets from ``expr.jets`` when it has
    that attribute.  Compares first and second derivatives, each scaled by
    ``1 + |jet|``.
    """
    from .expr import Expr, Program

    u = np.asarray(u, dtype=np.complex128)
    n = u.shape[0]
    if isinstance(expr, Expr):
        expr = [expr]
    prog = Program(list(expr), n)
    jet = prog.run(u, order=2)

    def f(p):
        return prog.run(p, order=0).value

    err = 0.0
    eye = np.eye(n)
    for i in range(n):
        d1 = (f(u + h * eye[i]) - f(u - h * eye[i])) / (2 * h)
        err = max(err, np.max(np.abs(jet.grad[:, i] - d1) / (1 + np.abs(jet.grad[:, i]))))
        for j in range(i, n):
            d2 = (f(u + h * eye[i] + h * eye[j]) - f(u + h * eye[i] - h * eye[j])
                  - f(u - h * eye[i] + h * eye[j]) + f(u - h * eye[i] - h * eye[j])) / (4 * h * h)
            hij = jet.hess[:, i, j]
            err = max(err, np.max(np.abs(hij - d2) / (1 + np.abs(hij))))
    return float(err)
