"""Curated constructions with known invariants, and random joins.

Every curated case is built from fixed internal seeds, so the suite is the
same object on every run; the analysis seed only drives sampling.
"""

from dataclasses import dataclass, field

import numpy as np

from . import expr as E
from . import variety as V
from .classify import invariant_report
from .frames import DirectionField
from .numeric import TOL_RANK, complex_normal

FOCAL_SUITE = ("cone_conic_P3", "tangential_twisted_cubic", "join_two_cubics_P4",
               "plane_band_quartic_P4", "dual_cubic_surface_P4", "conjugate_lines_surface_P4")


@dataclass
class Case:
    name: str
    build: object
    expect: dict = field(default_factory=dict)

    def describe(self):
        parts = []
        for key in ("label", "f", "f_min", "pattern", "sweeps"):
            if key in self.expect:
                val = self.expect[key]
                if key == "f_min":
                    parts.append(f"f>={val}")
                elif key in ("pattern", "sweeps"):
                    parts.append(f"{key}={'/'.join(map(str, val))}")
                else:
                    parts.append(f"{key}={val}")
        return " ".join(parts)


def _conic():
    t = E.param(0)
    return V.ParametrizedVariety("conic", 1, 3, [E.const(1), t, t * t, E.const(0)])


def _linear_vector(rng, N, n):
    """``a + sum_i b_i u_i`` with random complex coefficients, one entry per coordinate."""
    A = complex_normal(rng, (N + 1, n + 1))
    return [E.esum([E.const(A[c, 0])] + [E.scale(E.param(i), A[c, i + 1]) for i in range(n)])
            for c in range(N + 1)]


def random_cubic_surface(tag, N=4, degree=3):
    return V.random_polynomial_variety(np.random.default_rng(tag), 2, N, degree,
                                       name=f"random degree-{degree} surface in P{N}")


def hypersurface_graph(tag=7):
    rng = np.random.default_rng(tag)
    exps = [e for e in V._exponents(3, 3) if sum(e) == 3]
    q = E.monomial_poly(list(zip(exps, complex_normal(rng, len(exps)))))
    return V.ParametrizedVariety("cubic graph in P4", 3, 4,
                                 [E.const(1), E.param(0), E.param(1), E.param(2), q])


def _plane_band():
    C = V.rational_normal_curve(4, name="rational normal quartic")
    g = _linear_vector(np.random.default_rng(11), 4, 1)
    return V.plane_band(C, V.FrameField(C, [g]), name="plane band over quartic")


def _hyperband_curve():
    C = V.rational_normal_curve(3, name="twisted cubic")
    g = _linear_vector(np.random.default_rng(13), 3, 1)
    return V.hyperband(C, V.FrameField(C, [g]), name="hyperband over twisted cubic")


def _hyperband_surface():
    Y = random_cubic_surface(17, N=5, degree=2)
    rng = np.random.default_rng(19)
    frame = V.FrameField(Y, [_linear_vector(rng, 5, 2) for _ in range(2)])
    return V.hyperband(Y, frame, name="hyperband over surface in P5")


def curated_cases():
    rng = np.random.default_rng
    return [
        Case("cone_conic_P3",
             lambda: V.cone(_conic(), [[0, 0, 0, 1]], name="cone over conic"),
             {"f": 1, "pattern": (1,), "sweeps": (0,)}),
        Case("tangential_twisted_cubic",
             lambda: V.tangential_variety(V.rational_normal_curve(3, "twisted cubic")),
             {"f": 1, "pattern": (1,), "sweeps": (1,)}),
        Case("join_two_cubics_P4",
             lambda: V.join([V.random_polynomial_variety(rng(3), 1, 4, 3),
                             V.random_polynomial_variety(rng(4), 1, 4, 3)],
                            name="join of two cubic curves"),
             {"f": 1, "label": "1c"}),
        Case("plane_band_quartic_P4", _plane_band, {"f": 1, "label": "2b"}),
        Case("dual_cubic_surface_P4",
             lambda: V.dual_variety(random_cubic_surface(5), name="dual of cubic surface"),
             {"f": 1, "label": "1a"}),
        Case("conjugate_lines_surface_P4",
             lambda: V.line_union(random_cubic_surface(6), DirectionField.conjugate(0),
                                  name="conjugate lines of cubic surface"),
             {"f": 1, "label": "1a", "pattern": (1, 1)}),
        Case("cone_surface_P4",
             lambda: V.cone(random_cubic_surface(8, degree=2), [complex_normal(rng(9), 5)],
                            name="cone over surface"),
             {"f": 1, "label": "2c"}),
        Case("secant_quartic_P4",
             lambda: V.secant_variety(V.rational_normal_curve(4, "rational normal quartic")),
             {"f_min": 1, "label": "1c"}),
        Case("linear_P2_P4", lambda: V.linear_space(np.eye(5)[:3], name="P2 in P4"),
             {"f": 2}),
        Case("veronese_P5",
             lambda: V.ParametrizedVariety(
                 "Veronese surface", 2, 5,
                 [E.const(1), E.param(0), E.param(1), E.param(0) ** 2,
                  E.param(0) * E.param(1), E.param(1) ** 2]),
             {"f": 0}),
        Case("cubic_graph_P4", hypersurface_graph, {"f": 0, "label": "nondegenerate"}),
        Case("osculating_quintic_P5",
             lambda: V.osculating_variety(V.rational_normal_curve(5, "rational normal quintic")),
             {"f_min": 1}),
        Case("hyperband_curve_P3", _hyperband_curve, {"f_min": 1}),
        Case("hyperband_surface_P5", _hyperband_surface, {"f_min": 1}),
        Case("tangential_surface_P5",
             lambda: V.tangential_variety(random_cubic_surface(21, N=5, degree=2)),
             {"f_min": 1}),
        Case("join_three_curves_P6",
             lambda: V.join([V.random_polynomial_variety(rng(30 + i), 1, 6, 3) for i in range(3)],
                            name="join of three cubic curves"),
             {"f_min": 2}),
    ]


def case_by_name(name):
    for case in curated_cases():
        if case.name == name:
            return case
    raise KeyError(name)


def check_row(case, report):
    """Compare a report against a case's expectations; returns (passed, reasons)."""
    exp = case.expect
    bad = []
    f = report.get("f")
    if f is None:
        bad.append("no Gauss rank")
    else:
        if "f" in exp and f != exp["f"]:
            bad.append(f"f={f}")
        if "f_min" in exp and f < exp["f_min"]:
            bad.append(f"f={f}<{exp['f_min']}")
    pattern = tuple(m for _, m in report["focus"]["pattern"])
    if "pattern" in exp and pattern != tuple(exp["pattern"]):
        bad.append(f"pattern={pattern}")
    if "sweeps" in exp and tuple(report["focus"]["sweeps"]) != tuple(exp["sweeps"]):
        bad.append(f"sweeps={tuple(report['focus']['sweeps'])}")
    if "label" in exp and report.get("class") != exp["label"]:
        bad.append(f"class={report.get('class')}")
    if "errors" in report:
        bad.extend(f"{k}: {v}" for k, v in report["errors"].items())
    return not bad, bad


def run_case(case, seed=0, samples=20, tol=TOL_RANK, cluster_tol=1e-4, retries=5, fibers=10):
    X = case.build()
    report = invariant_report(X, seed=seed, samples=samples, tol=tol, cluster_tol=cluster_tol,
                              retries=retries, fibers=fibers)
    ok, reasons = check_row(case, report)
    return {"name": case.name, "expected": case.describe(), "n": report["n"], "N": report["N"],
            "r": report["r"], "f": report["f"],
            "pattern": [m for _, m in report["focus"]["pattern"]],
            "sweeps": list(report["focus"]["sweeps"]), "class": report["class"],
            "pass": ok, "notes": "; ".join(reasons)}


def run_suite(seed=0, samples=20, tol=TOL_RANK, cluster_tol=1e-4, retries=5, fibers=10,
              names=None):
    cases = curated_cases()
    if names is not None:
        cases = [c for c in cases if c.name in names]
    return [run_case(c, seed, samples, tol, cluster_tol, retries, fibers) for c in cases]


# --------------------------------------------------------------------------
# random joins


def random_join(rng, max_tries=100):
    """A random join of ``k in {2, 3}`` curves/surfaces of degree 2-3 in ``P^4..P^7``.

    The factor dimensions are redrawn until the join has ``n <= N - 1``.
    Returns ``(X, k)``.
    """
    for _ in range(max_tries):
        k = int(rng.integers(2, 4))
        N = int(rng.integers(4, 8))
        dims = [int(rng.integers(1, 3)) for _ in range(k)]
        n = sum(dims) + k - 1
        if n <= N - 1:
            break
    else:  # pragma: no cover - the loop always finds curves in P7
        k, N, dims = 2, 7, [1, 1]
    Ys = [V.random_polynomial_variety(rng, m, N, int(rng.integers(2, 4))) for m in dims]
    return V.join(Ys), k
