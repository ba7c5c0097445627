"""Exception hierarchy shared by every module of the package."""


class QMcKayError(Exception):
    """Base class for all errors raised by qmckay."""


# exactnum
class PoleError(QMcKayError, ZeroDivisionError):
    """A Gamma function pole that is not cancelled."""


class NotIntegerShift(QMcKayError, ValueError):
    pass


class OrderMismatch(QMcKayError, ValueError):
    pass


# lattice
class RankMismatch(QMcKayError):
    """The framing-free columns do not determine the transition matrix uniquely."""


class NoFramingRelation(QMcKayError):
    """No affine framing relation makes the two charge systems span the same space."""


class NonConstantRatio(QMcKayError):
    pass


class NonInteger(QMcKayError):
    pass


class WrongRank(QMcKayError, ValueError):
    pass


# series
class UnknownVariable(QMcKayError, KeyError):
    pass


class RegionMismatch(QMcKayError, ValueError):
    pass


# potential
class SpecSyntaxError(QMcKayError, ValueError):
    """Malformed bundle/spec document. ``path`` locates the offending field."""

    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class SemanticError(SpecSyntaxError):
    pass


class UnboundedRegion(QMcKayError):
    pass


class NonGenericFraming(QMcKayError):
    """A term hit an uncancelled Gamma pole; ``index`` is the offending index vector."""

    def __init__(self, message, index=None):
        self.index = index
        super().__init__(message)


class AssertionFailure(QMcKayError):
    """A superpotential invariant failed on an admissible index (bad spec data)."""


class NotBijective(QMcKayError):
    def __init__(self, message, index=None):
        self.index = index
        super().__init__(message)


class PipelineError(QMcKayError):
    """Wraps an upstream error with the verification stage where it occurred."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
