"""Small numerical linear algebra helpers shared across modules."""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.linalg import subspace_angles

TOL_RANK = 1e-7
GAP = 10.0


def gap_rank(sv, tol=TOL_RANK, ref=1.0, floor=0.0):
    """Numerical rank from singular values with a gap check.

    Counts singular values above ``tol * max(sigma_max, ref)``, or above an
    absolute noise ``floor`` when that is larger.  The sample is
    flagged ambiguous when the smallest kept value and the largest dropped value
    (or the threshold itself on an empty side) are within a factor of 10.
    Returns ``(rank, ambiguous)``.
    """
    sv = np.sort(np.abs(np.asarray(sv, dtype=float)))[::-1]
    scale = max(sv[0] if sv.size else 0.0, ref)
    if scale == 0.0:
        return 0, False
    thr = max(tol * scale, floor)
    kept = sv[sv > thr]
    dropped = sv[sv <= thr]
    upper = kept[-1] if kept.size else thr
    lower = dropped[0] if dropped.size else thr
    if lower == 0.0:
        return kept.size, False
    return kept.size, bool(upper / lower < GAP)


def matrix_rank(M, tol=TOL_RANK, ref=1.0):
    M = np.asarray(M)
    if M.size == 0:
        return 0, False
    return gap_rank(np.linalg.svd(M, compute_uv=False), tol, ref)


def nullspace(M, dim):
    """Orthonormal basis (columns) of the ``dim`` smallest right singular directions."""
    M = np.asarray(M, dtype=complex)
    ncols = M.shape[1]
    if dim == 0:
        return np.zeros((ncols, 0), complex)
    if M.shape[0] == 0:
        return np.eye(ncols, dtype=complex)[:, :dim]
    _, _, vh = np.linalg.svd(M)
    return vh[-dim:].conj().T


def orth_complement(A):
    """Orthonormal basis of the Hermitian orthogonal complement of ``span(A)``."""
    A = np.asarray(A, dtype=complex)
    u, s, _ = np.linalg.svd(A, full_matrices=True)
    r = int(np.sum(s > 1e-12 * (s[0] if s.size else 1)))
    return u[:, r:]


def unit(v):
    v = np.asarray(v, dtype=complex)
    return v / np.linalg.norm(v)


def projective_distance(p, q):
    """Sine of the angle between the complex lines through ``p`` and ``q``."""
    p = unit(p)
    q = unit(q)
    # residual form; sqrt(1 - cos^2) loses everything below ~1e-8
    return float(min(1.0, np.linalg.norm(q - p * np.vdot(p, q))))


def max_principal_angle(A, B):
    return float(np.max(subspace_angles(np.asarray(A, complex), np.asarray(B, complex))))


def complex_normal(rng, size, scale=1.0):
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2)


def sample_rng(seed, *stream):
    """Deterministic per-task generator derived from ``(seed, *stream)``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *stream]))


def threads():
    try:
        return max(1, int(os.environ.get("GAUSSRANK_THREADS", "1")))
    except ValueError:
        return 1


def ordered_map(fn, items):
    """Map with at most ``GAUSSRANK_THREADS`` workers; results keep input order."""
    items = list(items)
    k = threads()
    if k == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=k) as pool:
        return list(pool.map(fn, items))
