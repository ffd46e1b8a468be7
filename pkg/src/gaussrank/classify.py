"""Classification of threefolds in ``P^4`` with one-dimensional Gauss fibers,
the conjugate-structure verifier for generic ``f = 1`` varieties, and the
aggregated invariant report.
"""

import time
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import (DimensionMismatch, GaussRankError, MixedEvidence, PreconditionFailure,
                     TrackingAmbiguity)
from .focal import (FOCUS_CLUSTER_TOL, SWEEP_STEP, _chart, _match, _transverse_directions,
                    fiber_focus, focus_report, sweep_dimension)
from .frames import SecondFundamentalForm, conjugacy_check
from .gauss import gauss_rank
from .numeric import TOL_RANK, orth_complement, sample_rng
from .variety import DEFAULT_RETRIES, generic_sample, locate

LABELS = ("1a", "1b", "1c", "2a", "2b", "2c", "nondegenerate", "unsupported")

_TABLE = {
    ((1, 1), (2, 2)): "1a",
    ((1, 1), (2, 1)): "1b",
    ((1, 1), (1, 1)): "1c",
    ((2,), (2,)): "2a",
    ((2,), (1,)): "2b",
    ((2,), (0,)): "2c",
}


def decide_label(pattern, sweeps, f=1, n=3, N=4):
    """Label from the multiplicity pattern and sweep dimensions of one fiber."""
    if f == 0:
        return "nondegenerate"
    if f != 1 or (n, N) != (3, 4):
        return "unsupported"
    pairs = sorted(zip(pattern, sweeps), key=lambda ms: (-ms[0], -ms[1]))
    key = (tuple(m for m, _ in pairs), tuple(s for _, s in pairs))
    return _TABLE.get(key, "unsupported")


@dataclass
class ThreefoldClass:
    label: str
    analysis: object = None
    focus: object = None
    tally: dict = field(default_factory=dict)


def classify_threefold(X, seed=0, samples=20, fibers=10, tol=TOL_RANK,
                       cluster_tol=FOCUS_CLUSTER_TOL, retries=DEFAULT_RETRIES, analysis=None):
    """Vote the class of ``X^3 in P^4`` over ``fibers`` generic fibers.

    Votes must be unanimous; otherwise :class:`MixedEvidence` carries the
    tally.
    """
    if (X.n, X.N) != (3, 4):
        raise DimensionMismatch(f"{X.name}: classification needs n = 3, N = 4 (got {X.n}, {X.N})")
    if analysis is None:
        analysis = gauss_rank(X, seed=seed, samples=samples, tol=tol, retries=retries)
    if analysis.f != 1:
        return ThreefoldClass(decide_label((), (), analysis.f), analysis)
    focus = focus_report(X, seed=seed, fibers=fibers, cluster_tol=cluster_tol, tol=tol,
                         retries=retries)
    tally = Counter(decide_label(fb.pattern, fb.sweeps) for fb in focus.fibers)
    if len(tally) != 1:
        raise MixedEvidence(f"{X.name}: fiber votes disagree {dict(tally)}", dict(tally))
    label = next(iter(tally))
    return ThreefoldClass(label, analysis, focus, dict(tally))


# --------------------------------------------------------------------------
# conjugate structure


@dataclass
class ComponentCheck:
    fiber: int
    root: complex
    tangency: float
    conjugacy: float
    reference_distance: float = None


@dataclass
class ConjugateReport:
    passed: bool
    components: list
    fibers_checked: int
    tangency_tol: float
    conjugacy_tol: float
    reference_tol: float = None

    @property
    def tangency(self):
        return max(c.tangency for c in self.components)

    @property
    def conjugacy(self):
        return max(c.conjugacy for c in self.components)

    @property
    def reference_distance(self):
        """Worst fiber's distance from its closest focal component to the reference."""
        if self.reference_tol is None:
            return None
        best = {}
        for c in self.components:
            best[c.fiber] = min(best.get(c.fiber, np.inf), c.reference_distance)
        return max(best.values())


def _focal_point_map(X, fiber, cluster_tol, tol):
    """``w -> focal points on the fiber through u + sum w_l d_l`` (transverse)."""
    dirs = _transverse_directions(fiber)

    def at(w):
        du = sum(wl * d for wl, d in zip(w, dirs))
        other, _ = fiber_focus(X, fiber.u + du, cluster_tol, tol)
        return other.points

    return dirs, at


def _reconstruct(X, focus, fiber, cluster_tol, tol, h1=SWEEP_STEP, h2=1e-4):
    """Chart values, first and second derivatives of every focal component."""
    dirs, at = _focal_point_map(X, fiber, cluster_tol, tol)
    k = len(dirs)
    eye = np.eye(k)
    bases = [z / np.linalg.norm(z) for z in focus.points]
    cache = {}

    def chart_pts(w):
        key = tuple(np.round(w, 14))
        if key not in cache:
            cache[key] = at(w)
        pts = cache[key]
        out = []
        for z0 in bases:
            out.append(_chart(pts[_match(pts, z0, cluster_tol)], z0))
        return out

    zero = np.zeros(k)
    c0 = chart_pts(zero)
    first = [np.zeros((len(c0[0]), k), complex) for _ in bases]
    second = [np.zeros((len(c0[0]), k, k), complex) for _ in bases]
    for l in range(k):
        p, m = chart_pts(h1 * eye[l]), chart_pts(-h1 * eye[l])
        for i in range(len(bases)):
            first[i][:, l] = (p[i] - m[i]) / (2 * h1)
        p, m = chart_pts(h2 * eye[l]), chart_pts(-h2 * eye[l])
        for i in range(len(bases)):
            second[i][:, l, l] = (p[i] - 2 * c0[i] + m[i]) / h2 ** 2
        for j in range(l + 1, k):
            pp = chart_pts(h2 * (eye[l] + eye[j]))
            pm = chart_pts(h2 * (eye[l] - eye[j]))
            mp = chart_pts(h2 * (-eye[l] + eye[j]))
            mm = chart_pts(-h2 * (eye[l] + eye[j]))
            for i in range(len(bases)):
                v = (pp[i] - pm[i] - mp[i] + mm[i]) / (4 * h2 ** 2)
                second[i][:, l, j] = v
                second[i][:, j, l] = v
    return c0, first, second


def _component_residuals(c0, d1, d2, direction):
    """Tangency of the fiber line and conjugacy of its direction on one component."""
    W = np.column_stack([c0, d1])
    q, _ = np.linalg.qr(W)
    e = direction / np.linalg.norm(direction)
    tangency = float(np.linalg.norm(e - q @ (q.conj().T @ e)))
    normals = orth_complement(W)
    Q = np.einsum("km,kab->mab", normals.conj(), d2) / np.linalg.norm(c0)
    II = SecondFundamentalForm(0.5 * (Q + np.swapaxes(Q, 1, 2)))
    coords, *_ = np.linalg.lstsq(W, e, rcond=None)
    a = coords[1:]
    B = np.einsum("a,mab->mb", a, II.quadrics)
    b = np.linalg.svd(B)[2][-1].conj()
    return tangency, conjugacy_check(II, a, b)


def verify_conjugate_structure(X, seed=0, reference=None, fibers=3, tol=TOL_RANK,
                               cluster_tol=FOCUS_CLUSTER_TOL, retries=DEFAULT_RETRIES,
                               tangency_tol=1e-5, conjugacy_tol=1e-4, reference_tol=1e-5):
    """Check that ``X`` is a union of conjugate lines to each focal variety.

    Requires ``f = 1`` and, on the sampled fibers, ``n - 1`` simple focal
    points each sweeping an ``(n - 1)``-fold.  Each focal variety is rebuilt
    locally from focal points of nearby fibers; the fiber line must be
    tangent to it and its direction must have a conjugate partner for the
    rebuilt second fundamental form.  With ``reference``, the closest
    component is also compared pointwise against that variety.
    """
    n = X.n
    comps = []
    last = None
    for index in range(fibers):
        fiber = focus = None
        for attempt in range(retries):
            rng = sample_rng(seed, index, attempt)
            try:
                u, jets, _ = generic_sample(X, rng, retries=retries, tol=tol, order=3)
                focus, fiber = fiber_focus(X, u, cluster_tol, tol, jets=jets)
                break
            except GaussRankError as exc:
                last = exc
        if fiber is None:
            raise PreconditionFailure(f"{X.name}: no usable fiber ({last})")
        if focus.pattern != (1,) * (n - 1):
            raise PreconditionFailure(
                f"{X.name}: focus pattern {focus.pattern}, need {n - 1} simple points")
        try:
            sweeps = sweep_dimension(X, focus, fiber, cluster_tol=cluster_tol, tol=tol)
            if any(s != n - 1 for s in sweeps):
                raise PreconditionFailure(
                    f"{X.name}: focal sweeps {sweeps}, need every component {n - 1}-dimensional")
            c0, first, second = _reconstruct(X, focus, fiber, cluster_tol, tol)
        except TrackingAmbiguity as exc:
            raise PreconditionFailure(f"{X.name}: focal tracking failed ({exc})") from exc
        for i, (root, _) in enumerate(focus.roots):
            tan, conj = _component_residuals(c0[i], first[i], second[i], fiber.direction)
            ref = None
            if reference is not None:
                rrng = np.random.default_rng([seed, index, i])
                ref = locate(reference, focus.points[i], rng=rrng, starts=12)[1]
            comps.append(ComponentCheck(index, root, tan, conj, ref))
    report = ConjugateReport(False, comps, fibers, tangency_tol, conjugacy_tol,
                             reference_tol if reference is not None else None)
    report.passed = report.tangency < tangency_tol and report.conjugacy < conjugacy_tol
    if reference is not None:
        report.passed = report.passed and report.reference_distance < reference_tol
    return report


# --------------------------------------------------------------------------
# report


def fiber_floor(X):
    """Lower bound on ``f`` implied by how ``X`` was built, or ``None``."""
    prov = X.provenance
    op = prov.get("op")
    if op in ("join", "cone", "secant") and "t_block" in prov:
        return prov["t_block"][1]
    if op in ("tangential", "hyperband"):
        return 1
    if op == "line_union" and prov.get("field") == "conjugate":
        return 1
    return None


def _c(z):
    return [round(float(np.real(z)), 9), round(float(np.imag(z)), 9)]


def invariant_report(X, seed=0, samples=20, tol=TOL_RANK, cluster_tol=FOCUS_CLUSTER_TOL,
                     retries=DEFAULT_RETRIES, fibers=10, timings=False):
    """Deterministic, JSON-serializable summary of all invariants of ``X``.

    Stage failures are embedded under ``"errors"`` instead of raised.
    """
    report = {"name": X.name, "n": X.n, "N": X.N, "r": None, "f": None,
              "focus": {"pattern": [], "sweeps": [], "degree": None},
              "class": None, "seed": int(seed),
              "tolerances": {"tol_rank": tol, "cluster_tol": cluster_tol, "retries": retries,
                             "samples": samples},
              "timings": {}}
    errors = {}
    clock = {}
    t0 = time.perf_counter()
    analysis = None
    try:
        analysis = gauss_rank(X, seed=seed, samples=samples, tol=tol, retries=retries)
        report.update(r=analysis.r, f=analysis.f, samples_used=analysis.samples_used,
                      ambiguous_rate=round(analysis.ambiguous_rate, 6))
    except GaussRankError as exc:
        errors["gauss"] = f"{type(exc).__name__}: {exc}"
    clock["gauss"] = time.perf_counter() - t0
    floor = fiber_floor(X)
    if floor is not None:
        report["fiber_floor"] = {"bound": floor,
                                 "holds": analysis is not None and analysis.f >= floor}
    if analysis is not None:
        label = decide_label((), (), analysis.f, X.n, X.N)
        if analysis.f == 1:
            t1 = time.perf_counter()
            try:
                focus = focus_report(X, seed=seed, fibers=fibers, cluster_tol=cluster_tol,
                                     tol=tol, retries=retries)
                report["focus"] = {"pattern": [[_c(t), m] for t, m in focus.roots],
                                   "sweeps": list(focus.sweeps),
                                   "degree": focus.degree_check,
                                   "fibers": focus.fiber_count}
                votes = Counter(decide_label(fb.pattern, fb.sweeps, 1, X.n, X.N)
                                for fb in focus.fibers)
                if len(votes) == 1:
                    label = next(iter(votes))
                else:
                    label = None
                    errors["classify"] = f"MixedEvidence: {dict(sorted(votes.items()))}"
            except GaussRankError as exc:
                label = None
                errors["focus"] = f"{type(exc).__name__}: {exc}"
            clock["focus"] = time.perf_counter() - t1
        report["class"] = label
    if errors:
        report["errors"] = errors
    if timings:
        report["timings"] = {k: round(v, 4) for k, v in clock.items()}
    return report
