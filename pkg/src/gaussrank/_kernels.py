"""Hot loops: jet-program interpreter and Pluecker minors.

Both kernels exist twice, as numba ``@njit`` functions and as plain numpy.
The numba path is used unless ``GAUSSRANK_NUMBA=0`` is set or numba fails to
import.  ``benchmarks/bench_kernels.py`` compares the two.
"""

import os
from functools import lru_cache

import numpy as np

OP_CONST, OP_PARAM, OP_ADD, OP_MUL, OP_SCALE, OP_POW = range(6)

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False


def numba_enabled():
    return HAS_NUMBA and os.environ.get("GAUSSRANK_NUMBA", "1") != "0"


def jet_width(n):
    return 1 + n + n * n + n * n * n


@lru_cache(maxsize=None)
def canon_index2(n):
    """Flat index of the canonical (sorted) entry for every (i, j)."""
    idx = np.empty(n * n, dtype=np.intp)
    for i in range(n):
        for j in range(n):
            a, b = sorted((i, j))
            idx[i * n + j] = a * n + b
    return idx


@lru_cache(maxsize=None)
def canon_index3(n):
    idx = np.empty(n * n * n, dtype=np.intp)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                a, b, c = sorted((i, j, k))
                idx[(i * n + j) * n + k] = (a * n + b) * n + c
    return idx


# --------------------------------------------------------------------------
# numpy reference path


def _np_mul(a, b, n, order):
    out = np.zeros_like(a)
    g0, h0, t0 = 1, 1 + n, 1 + n + n * n
    a0, b0 = a[0], b[0]
    out[0] = a0 * b0
    if order >= 1:
        ga, gb = a[g0:h0], b[g0:h0]
        out[g0:h0] = a0 * gb + b0 * ga
    if order >= 2:
        Ha = a[h0:t0].reshape(n, n)
        Hb = b[h0:t0].reshape(n, n)
        H = a0 * Hb + b0 * Ha + np.outer(ga, gb) + np.outer(gb, ga)
        out[h0:t0] = H.reshape(-1)[canon_index2(n)]
    if order >= 3:
        Ta, Tb = a[t0:], b[t0:]
        T = a0 * Tb.reshape(n, n, n) + b0 * Ta.reshape(n, n, n)
        T = T + _sym3(ga, Hb) + _sym3(gb, Ha)
        out[t0:] = T.reshape(-1)[canon_index3(n)]
    return out


def _sym3(g, H):
    return (g[:, None, None] * H[None, :, :]
            + g[None, :, None] * H[:, None, :]
            + g[None, None, :] * H[:, :, None])


def _np_compose(a, d1, d2, d3, value, n, order):
    out = np.zeros_like(a)
    g0, h0, t0 = 1, 1 + n, 1 + n + n * n
    out[0] = value
    if order >= 1:
        ga = a[g0:h0]
        out[g0:h0] = d1 * ga
    if order >= 2:
        Ha = a[h0:t0].reshape(n, n)
        H = d1 * Ha + d2 * np.outer(ga, ga)
        out[h0:t0] = H.reshape(-1)[canon_index2(n)]
    if order >= 3:
        T = d1 * a[t0:].reshape(n, n, n) + d2 * _sym3(ga, Ha)
        T = T + d3 * ga[:, None, None] * ga[None, :, None] * ga[None, None, :]
        out[t0:] = T.reshape(-1)[canon_index3(n)]
    return out


def _pow_coeffs(a0, e):
    value = a0 ** e
    d1 = e * a0 ** (e - 1) if e >= 1 else 0.0
    d2 = e * (e - 1) * a0 ** (e - 2) if e >= 2 else 0.0
    d3 = e * (e - 1) * (e - 2) * a0 ** (e - 3) if e >= 3 else 0.0
    return value, d1, d2, d3


def _run_program_numpy(ops, a_idx, b_idx, ival, consts, u, order):
    n = u.shape[0]
    L = jet_width(n)
    out = np.zeros((ops.shape[0], L), dtype=np.complex128)
    for k in range(ops.shape[0]):
        op = ops[k]
        if op == OP_CONST:
            out[k, 0] = consts[ival[k]]
        elif op == OP_PARAM:
            i = ival[k]
            out[k, 0] = u[i]
            if order >= 1:
                out[k, 1 + i] = 1.0
        elif op == OP_ADD:
            out[k] = out[a_idx[k]] + out[b_idx[k]]
        elif op == OP_SCALE:
            out[k] = consts[ival[k]] * out[a_idx[k]]
        elif op == OP_MUL:
            out[k] = _np_mul(out[a_idx[k]], out[b_idx[k]], n, order)
        elif op == OP_POW:
            a = out[a_idx[k]]
            v, d1, d2, d3 = _pow_coeffs(a[0], int(ival[k]))
            out[k] = _np_compose(a, d1, d2, d3, v, n, order)
        else:
            raise ValueError(f"bad opcode {op}")
    return out


def _minors_numpy(W, combos):
    sub = W[:, combos]  # (r, C, r)
    return np.linalg.det(np.transpose(sub, (1, 0, 2)))


# --------------------------------------------------------------------------
# numba path

if HAS_NUMBA:

    @njit(cache=True, nogil=True)
    def _ipow(z, e):
        r = 1.0 + 0.0j
        for _ in range(e):
            r *= z
        return r

    @njit(cache=True, nogil=True)
    def _run_program_nb(ops, a_idx, b_idx, ival, consts, u, order):
        n = u.shape[0]
        g0 = 1
        h0 = 1 + n
        t0 = 1 + n + n * n
        L = t0 + n * n * n
        out = np.zeros((ops.shape[0], L), dtype=np.complex128)
        for k in range(ops.shape[0]):
            op = ops[k]
            row = out[k]
            if op == 0:
                row[0] = consts[ival[k]]
            elif op == 1:
                i = ival[k]
                row[0] = u[i]
                if order >= 1:
                    row[g0 + i] = 1.0
            elif op == 2:
                a = out[a_idx[k]]
                b = out[b_idx[k]]
                for q in range(L):
                    row[q] = a[q] + b[q]
            elif op == 4:
                a = out[a_idx[k]]
                c = consts[ival[k]]
                for q in range(L):
                    row[q] = c * a[q]
            elif op == 3:
                a = out[a_idx[k]]
                b = out[b_idx[k]]
                a0 = a[0]
                b0 = b[0]
                row[0] = a0 * b0
                if order >= 1:
                    for i in range(n):
                        row[g0 + i] = a0 * b[g0 + i] + b0 * a[g0 + i]
                if order >= 2:
                    for i in range(n):
                        for j in range(i, n):
                            v = (a0 * b[h0 + i * n + j] + b0 * a[h0 + i * n + j]
                                 + a[g0 + i] * b[g0 + j] + a[g0 + j] * b[g0 + i])
                            row[h0 + i * n + j] = v
                            row[h0 + j * n + i] = v
                if order >= 3:
                    for i in range(n):
                        for j in range(i, n):
                            for l in range(j, n):
                                v = (a0 * b[t0 + (i * n + j) * n + l]
                                     + b0 * a[t0 + (i * n + j) * n + l]
                                     + a[g0 + i] * b[h0 + j * n + l]
                                     + a[g0 + j] * b[h0 + i * n + l]
                                     + a[g0 + l] * b[h0 + i * n + j]
                                     + b[g0 + i] * a[h0 + j * n + l]
                                     + b[g0 + j] * a[h0 + i * n + l]
                                     + b[g0 + l] * a[h0 + i * n + j])
                                _put3(row, t0, n, i, j, l, v)
            elif op == 5:
                a = out[a_idx[k]]
                e = ival[k]
                a0 = a[0]
                d1 = 0.0j
                d2 = 0.0j
                d3 = 0.0j
                if e >= 1:
                    d1 = e * _ipow(a0, e - 1)
                if e >= 2:
                    d2 = e * (e - 1) * _ipow(a0, e - 2)
                if e >= 3:
                    d3 = e * (e - 1) * (e - 2) * _ipow(a0, e - 3)
                row[0] = _ipow(a0, e)
                if order >= 1:
                    for i in range(n):
                        row[g0 + i] = d1 * a[g0 + i]
                if order >= 2:
                    for i in range(n):
                        for j in range(i, n):
                            v = d1 * a[h0 + i * n + j] + d2 * a[g0 + i] * a[g0 + j]
                            row[h0 + i * n + j] = v
                            row[h0 + j * n + i] = v
                if order >= 3:
                    for i in range(n):
                        for j in range(i, n):
                            for l in range(j, n):
                                v = (d1 * a[t0 + (i * n + j) * n + l]
                                     + d2 * (a[g0 + i] * a[h0 + j * n + l]
                                             + a[g0 + j] * a[h0 + i * n + l]
                                             + a[g0 + l] * a[h0 + i * n + j])
                                     + d3 * a[g0 + i] * a[g0 + j] * a[g0 + l])
                                _put3(row, t0, n, i, j, l, v)
        return out

    @njit(cache=True, nogil=True)
    def _put3(row, t0, n, i, j, l, v):
        row[t0 + (i * n + j) * n + l] = v
        row[t0 + (i * n + l) * n + j] = v
        row[t0 + (j * n + i) * n + l] = v
        row[t0 + (j * n + l) * n + i] = v
        row[t0 + (l * n + i) * n + j] = v
        row[t0 + (l * n + j) * n + i] = v

    @njit(cache=True, nogil=True)
    def _det_small(M):
        # partial-pivot LU on a copy
        A = M.copy()
        r = A.shape[0]
        det = 1.0 + 0.0j
        for c in range(r):
            p = c
            best = abs(A[c, c])
            for q in range(c + 1, r):
                if abs(A[q, c]) > best:
                    best = abs(A[q, c])
                    p = q
            if best == 0.0:
                return 0.0j
            if p != c:
                for q in range(r):
                    tmp = A[c, q]
                    A[c, q] = A[p, q]
                    A[p, q] = tmp
                det = -det
            piv = A[c, c]
            det *= piv
            for q in range(c + 1, r):
                f = A[q, c] / piv
                for s in range(c + 1, r):
                    A[q, s] -= f * A[c, s]
        return det

    @njit(cache=True, nogil=True)
    def _minors_nb(W, combos):
        r = W.shape[0]
        C = combos.shape[0]
        out = np.empty(C, dtype=np.complex128)
        sub = np.empty((r, r), dtype=np.complex128)
        for c in range(C):
            for i in range(r):
                for j in range(r):
                    sub[i, j] = W[i, combos[c, j]]
            out[c] = _det_small(sub)
        return out


def run_program(ops, a_idx, b_idx, ival, consts, u, order):
    """Evaluate a flattened jet program; returns one packed jet row per node."""
    u = np.ascontiguousarray(u, dtype=np.complex128)
    if numba_enabled():
        return _run_program_nb(ops, a_idx, b_idx, ival, consts, u, int(order))
    return _run_program_numpy(ops, a_idx, b_idx, ival, consts, u, int(order))


def minors(W, combos):
    """All maximal minors of ``W`` (r x m) over the column index sets ``combos``."""
    W = np.ascontiguousarray(W, dtype=np.complex128)
    if numba_enabled():
        return _minors_nb(W, np.ascontiguousarray(combos, dtype=np.int64))
    return _minors_numpy(W, combos)
