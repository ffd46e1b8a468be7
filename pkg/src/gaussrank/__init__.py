"""Numerical invariants of projective varieties with degenerate Gauss maps."""

__version__ = "0.1.0"

from .errors import GaussRankError, GeometryError, SpecError  # noqa: E402
from .jets import Jet3, seed_variable  # noqa: E402
from .variety import (ParametrizedVariety, FrameField, cone, dual_variety, hyperband,  # noqa: E402
                      join, line_union, osculating_variety, plane_band, projective_transform,
                      reparametrize, secant_variety, tangential_variety)
from .frames import (DirectionField, conjugate_directions, second_fundamental_form,  # noqa: E402
                     tangent_frame)
from .gauss import gauss_rank, pluecker_gauss, terracini_check  # noqa: E402
from .focal import fiber_through, focus_polynomial, focus_report, focus_roots  # noqa: E402
from .classify import (classify_threefold, invariant_report,  # noqa: E402
                       verify_conjugate_structure)
from .specfile import load_spec  # noqa: E402

__all__ = [
    "GaussRankError", "GeometryError", "SpecError", "Jet3", "seed_variable",
    "ParametrizedVariety", "FrameField", "cone", "dual_variety", "hyperband", "join",
    "line_union", "osculating_variety", "plane_band", "projective_transform", "reparametrize",
    "secant_variety", "tangential_variety", "DirectionField", "conjugate_directions",
    "second_fundamental_form", "tangent_frame", "gauss_rank", "pluecker_gauss",
    "terracini_check", "fiber_through", "focus_polynomial", "focus_report", "focus_roots",
    "classify_threefold", "invariant_report", "verify_conjugate_structure", "load_spec",
]
