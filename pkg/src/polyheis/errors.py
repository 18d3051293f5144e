"""Exception hierarchy. Every error carries a machine-readable ``kind``."""


class PolyheisError(ValueError):
    """Base class; ``kind`` is the class name unless overridden."""

    @property
    def kind(self) -> str:
        return type(self).__name__


class GeometryError(PolyheisError):
    pass


class NotCentrallySymmetric(GeometryError):
    pass


class NotConvex(GeometryError):
    pass


class WrongOrientation(GeometryError):
    pass


class DegenerateEdge(GeometryError):
    pass


class DegeneratePolygon(GeometryError):
    """Fewer than four vertices or an odd vertex count."""


class NonPositiveLambda(PolyheisError):
    pass


class DegenerateMu(PolyheisError):
    pass


class OutsideCone(PolyheisError):
    pass


class OutsideDisk(PolyheisError):
    pass


class NoPanelFound(PolyheisError):
    pass


class NotOnSphere(PolyheisError):
    pass


class OriginPoint(PolyheisError):
    pass


class NotSmoothPoint(PolyheisError):
    pass


class InvalidS(PolyheisError):
    pass


class UnreachableTarget(PolyheisError):
    pass


class InputError(PolyheisError):
    """Malformed files or command-line values."""
