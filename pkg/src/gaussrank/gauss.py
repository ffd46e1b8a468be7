"""The Gauss map: Pluecker coordinates of embedded tangent spaces, its rank,
and Terracini constancy along the linear spaces of a join.

The rank of the Gauss map is measured twice at each sample, once from the
Jacobian of the Pluecker vector and once as ``n - dim ker II``.  The two must
agree; a disagreement is raised, never averaged away.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

from . import _kernels
from .errors import (AllSamplesAmbiguous, GaussRankError, OracleMismatch, ProvenanceError,
                     RankDrop)
from .frames import kernel_dimension, second_fundamental_form, tangent_frame
from .numeric import (GAP, TOL_RANK, complex_normal, gap_rank, max_principal_angle,
                      ordered_map, sample_rng)
from .variety import DEFAULT_RETRIES, generic_sample

FD_STEP = 1e-5
# long geometric directions at near-degenerate frames would otherwise take
# parameter steps where truncation error dominates
MAX_PARAM_STEP = 1e-3
STENCIL = (-2, -1, 1, 2)
# singular values within this factor of the measured FD noise are not counted
NOISE_FACTOR = 10.0


def stencil_derivative(values, h):
    """Fourth-order central difference from values at ``STENCIL * h``."""
    fm2, fm1, fp1, fp2 = values
    return (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h)


def stencil_noise(values, center, h):
    """Rounding noise in :func:`stencil_derivative`, from the fourth difference.

    For smooth data the fourth difference of five equispaced values is
    ``O(h^4)``; what remains is evaluation noise, which the stencil weights
    carry into the derivative.
    """
    fm2, fm1, fp1, fp2 = values
    point = np.linalg.norm(fm2 - 4 * fm1 + 6 * center - 4 * fp1 + fp2) / np.sqrt(70.0)
    return np.sqrt(130.0) / 12 * point / h


def capped_step(d, h, max_move=MAX_PARAM_STEP):
    """Step ``h`` along ``d``, shortened so the parameter moves at most ``max_move``."""
    return min(h, max_move / max(float(np.linalg.norm(d)), 1e-300))


@lru_cache(maxsize=None)
def _combos(N, n):
    return np.array(list(combinations(range(N + 1), n + 1)), dtype=np.int64)


def _raw_pluecker(X, u, jets=None):
    if jets is None:
        jets = X.evaluate(u, order=1)
    W = np.vstack([jets.value[None, :], jets.grad.T])
    return _kernels.minors(W, _combos(X.N, X.n))


def pluecker_gauss(X, u, jets=None):
    """Unit Pluecker vector of the embedded tangent space at ``u``.

    The phase is fixed by making the first significant coordinate real
    positive.
    """
    p = _raw_pluecker(X, u, jets)
    norm = np.linalg.norm(p)
    if norm == 0:
        raise RankDrop("embedded tangent space is degenerate at the sample")
    p = p / norm
    k = int(np.argmax(np.abs(p) > 1e-9))
    return p * (abs(p[k]) / p[k])


def pluecker_jacobian(X, u, frame=None, h=FD_STEP, with_noise=False):
    """Finite-difference Jacobian of the Gauss map along unit tangent directions.

    The Pluecker vector ``p`` is read in the holomorphic affine chart
    ``p / <p0, p>`` around the base value ``p0`` so the derivative is complex
    linear; columns are derivatives along ``R^{-1} e_k``, i.e. along
    orthonormal directions of the embedded tangent space.  Near-degenerate
    frames make those directions long, so the parameter move per step is
    capped; a fourth-order stencil keeps truncation error far below the
    rank threshold.  With ``with_noise`` the estimated
    rounding noise of the whole matrix is returned as well.
    """
    u = np.asarray(u, dtype=complex)
    if frame is None:
        frame = tangent_frame(X, u)
    p0 = _raw_pluecker(X, u)
    p0 = p0 / np.linalg.norm(p0)

    def chart(w):
        p = _raw_pluecker(X, w)
        return p / np.vdot(p0, p)

    center = chart(u)
    cols, noise = [], 0.0
    for k in range(X.n):
        d = frame.from_geometric(np.eye(X.n)[k])
        step = capped_step(d, h)
        vals = [chart(u + c * step * d) for c in STENCIL]
        cols.append(stencil_derivative(vals, step))
        noise += stencil_noise(vals, center, step) ** 2
    J = np.column_stack(cols) if cols else np.zeros((p0.size, 0), complex)
    return (J, float(np.sqrt(noise))) if with_noise else J


@dataclass
class SampleRecord:
    u: np.ndarray
    pluecker_rank: int
    fiber_dim: int
    attempts: int


@dataclass
class GaussAnalysis:
    n: int
    N: int
    r: int
    f: int
    samples_used: int
    ambiguous_rate: float
    samples: list = field(default_factory=list, repr=False)


def analyze_sample(X, u, jets=None, tol=TOL_RANK):
    """``(pluecker rank, II-kernel dim, ambiguous)`` at one parameter point."""
    if jets is None:
        jets = X.evaluate(u, order=2)
    frame = tangent_frame(X, u, jets, tol)
    II = second_fundamental_form(X, u, jets, frame, tol)
    kdim, amb_ii = kernel_dimension(II, tol)
    J, noise = pluecker_jacobian(X, u, frame, with_noise=True)
    if J.size:
        sv = np.linalg.svd(J, compute_uv=False)
        r, amb_p = gap_rank(sv, tol, floor=NOISE_FACTOR * noise)
        # near singular points rounding can bury genuine singular values
        amb_p = amb_p or NOISE_FACTOR * noise > GAP * tol * max(sv[0], 1.0)
    else:
        r, amb_p = 0, False
    return r, kdim, amb_ii or amb_p


def _sample_task(X, seed, index, tol, retries):
    ambiguous = 0
    for attempt in range(retries):
        rng = sample_rng(seed, index, attempt)
        try:
            u, jets, _ = generic_sample(X, rng, retries=retries, tol=tol, order=2)
            r, kdim, amb = analyze_sample(X, u, jets, tol)
        except GaussRankError:
            ambiguous += 1
            continue
        if amb:
            ambiguous += 1
            continue
        return SampleRecord(u, r, kdim, attempt + 1), ambiguous
    return None, ambiguous


def gauss_rank(X, seed=0, samples=20, tol=TOL_RANK, retries=DEFAULT_RETRIES):
    """Majority-voted Gauss rank over ``samples`` generic points.

    Each sample is accepted only if both rank measurements are unambiguous;
    ambiguous draws are redrawn from the sample's own stream.  Raises
    :class:`OracleMismatch` if the two measurements disagree at any accepted
    sample and :class:`AllSamplesAmbiguous` if more than half of all draws
    were ambiguous.
    """
    results = ordered_map(lambda k: _sample_task(X, seed, k, tol, retries), range(samples))
    records = [rec for rec, _ in results if rec is not None]
    draws = sum(amb for _, amb in results) + len(records)
    amb_total = sum(amb for _, amb in results)
    rate = amb_total / draws if draws else 1.0
    if not records or rate > 0.5:
        raise AllSamplesAmbiguous(
            f"{X.name}: {amb_total} of {draws} draws were ambiguous or non-generic")
    for rec in records:
        if rec.pluecker_rank != X.n - rec.fiber_dim:
            raise OracleMismatch(
                f"{X.name}: Pluecker rank {rec.pluecker_rank} but II kernel of dimension "
                f"{rec.fiber_dim} (n = {X.n}) at u = {np.round(rec.u, 6).tolist()}")
    ranks = [rec.pluecker_rank for rec in records]
    vals, counts = np.unique(ranks, return_counts=True)
    r = int(vals[np.argmax(counts)])
    return GaussAnalysis(n=X.n, N=X.N, r=r, f=X.n - r, samples_used=len(records),
                         ambiguous_rate=float(rate), samples=records)


def terracini_check(X, u=None, trials=10, seed=0, block=None):
    """Max principal angle between embedded tangent spaces along a join's ``P^{k-1}``.

    By default only the ``t`` parameters move; ``block=j`` moves the
    parameters of the ``j``-th factor instead, which should change the
    tangent space.
    """
    prov = X.provenance
    if "t_block" not in prov:
        raise ProvenanceError(f"{X.name} was not built by join, cone or secant_variety")
    rng = np.random.default_rng(seed)
    if u is None:
        u, _, _ = generic_sample(X, rng, order=1)
    u = np.asarray(u, dtype=complex)
    start, count = prov["t_block"] if block is None else prov["blocks"][block]
    base = tangent_frame(X, u).span()
    worst = 0.0
    for _ in range(trials):
        w = u.copy()
        w[start:start + count] = complex_normal(rng, count)
        worst = max(worst, max_principal_angle(base, tangent_frame(X, w).span()))
    return worst
