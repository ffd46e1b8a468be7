"""Exception hierarchy.

``GeometryError`` subclasses signal geometric trouble (non-generic samples,
oracle disagreement, ambiguous evidence) and map to CLI exit code 2;
``SpecError`` is an input problem and maps to exit code 1.
"""


class GaussRankError(Exception):
    pass


class SpecError(GaussRankError, ValueError):
    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = []
        if path:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{': '.join(where)}: {message}" if where else message)


class GeometryError(GaussRankError):
    pass


class DimensionMismatch(GeometryError, ValueError):
    pass


class RankDrop(GeometryError):
    """The parametrization is not immersive (or a frame is dependent) at a sample."""


class NonGeneric(GeometryError):
    """Every retry sample was degenerate."""


class FrameDependence(NonGeneric):
    pass


class OracleMismatch(GeometryError):
    pass


class AllSamplesAmbiguous(GeometryError):
    pass


class NondegenerateQuadricNotFound(GeometryError):
    pass


class AmbiguousDirections(GeometryError):
    pass


class NoCommonRoot(GeometryError):
    pass


class UnsupportedFiberDimension(GeometryError):
    pass


class FiberVerificationError(GeometryError):
    pass


class FitResidualError(GeometryError):
    pass


class TrackingAmbiguity(GeometryError):
    pass


class MixedEvidence(GeometryError):
    def __init__(self, message, tally=None):
        super().__init__(message)
        self.tally = dict(tally or {})


class PreconditionFailure(GeometryError):
    pass


class ProvenanceError(GeometryError, TypeError):
    pass


class ZeroPolynomial(GeometryError):
    pass
