"""Exception hierarchy shared by all torlat modules."""


class TorlatError(Exception):
    """Base class for every error raised by this package."""


class SingularMatrix(TorlatError, ZeroDivisionError):
    pass


class NotPositiveDefinite(TorlatError, ValueError):
    pass


class DimensionMismatch(TorlatError, ValueError):
    pass


class NotFiniteWithinBound(TorlatError):
    """Closure exceeded its cap: the group is infinite or the cap is too small."""

    def __init__(self, cap):
        super().__init__(f"group closure exceeded {cap} elements")
        self.cap = cap


class OrbitExplosion(TorlatError):
    def __init__(self, bound):
        super().__init__(f"vector orbit exceeded {bound} points")
        self.bound = bound


class InvalidType(TorlatError, ValueError):
    pass


class NotASubgroup(TorlatError, ValueError):
    pass


class MismatchedGroups(TorlatError, ValueError):
    """Two representations are not given over a common, matched acting group."""


class NotFinite(TorlatError, ValueError):
    pass


class IncompleteSeedSet(TorlatError):
    pass


class NotInCatalog(TorlatError, LookupError):
    pass


class CatalogFormatError(TorlatError):
    pass


class FormatVersionMismatch(CatalogFormatError):
    pass


class ChecksumMismatch(CatalogFormatError):
    pass


class SerreBoundViolation(TorlatError, AssertionError):
    """A reduction-map bound failed; carries the offending witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
