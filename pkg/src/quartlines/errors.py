"""Exception hierarchy.

Every error raised by the library derives from :class:`QuartlinesError`; the
CLI maps the three families below onto exit codes (parse=2, embedding=3,
everything else=4).
"""


class QuartlinesError(Exception):
    """Base class for all library errors."""


class ParseFailure(QuartlinesError):
    """Input text could not be turned into the requested object."""


class EmbeddingFailure(QuartlinesError):
    """A coefficient or point cannot be represented in the requested field."""


# -- field -----------------------------------------------------------------

class CompositeModulus(QuartlinesError, ValueError):
    pass


class TooSmallPrime(QuartlinesError, ValueError):
    pass


class DomainMismatch(QuartlinesError, TypeError):
    pass


class NoSquareRootInField(EmbeddingFailure):
    pass


class DenominatorNotInvertible(EmbeddingFailure):
    pass


# -- poly ------------------------------------------------------------------

class PolynomialSyntaxError(ParseFailure, SyntaxError):
    """Raised by the expression parser; ``pos`` is the 0-based offset."""

    def __init__(self, message, text="", pos=0):
        super().__init__(f"{message} at position {pos}")
        self.msg = message
        self.text = text
        self.pos = pos
        self.offset = pos + 1


class SingularMatrix(QuartlinesError, ValueError):
    pass


class NotDivisible(QuartlinesError, ArithmeticError):
    pass


class DegenerateLine(QuartlinesError, ValueError):
    pass


class BothZero(QuartlinesError, ValueError):
    pass


# -- geom ------------------------------------------------------------------

class SameLine(QuartlinesError, ValueError):
    pass


class NotLinear(QuartlinesError, ValueError):
    pass


class DuplicatePoint(ParseFailure, ValueError):
    pass


# -- surface ---------------------------------------------------------------

class NotDegree4(ParseFailure, ValueError):
    pass


class NotHomogeneous(ParseFailure, ValueError):
    pass


class PointNotOnSurface(QuartlinesError, ValueError):
    pass


class NotDoublePoint(QuartlinesError, ValueError):
    pass


class NotNormalizable(QuartlinesError, ValueError):
    pass


class LineInCone(QuartlinesError, ValueError):
    pass


class LineNotOnSurface(QuartlinesError, ValueError):
    pass


class PlaneThroughConeAxis(QuartlinesError, ValueError):
    """The plane spanned by the line and O has the form y = lambda*z."""


# -- enumerate / bounds ----------------------------------------------------

class SmoothPoint(QuartlinesError, ValueError):
    pass


class SingularPoint(QuartlinesError, ValueError):
    pass


class CurveNotOnSurface(QuartlinesError, ValueError):
    pass


class WrongShape(QuartlinesError, ValueError):
    pass


class LineMissing(QuartlinesError, ValueError):
    pass


class DegenerateCurve(QuartlinesError, ValueError):
    pass


class ZeroResultant(QuartlinesError, ValueError):
    pass


class TheoremViolation(QuartlinesError, AssertionError):
    """A proven upper bound was exceeded; never suppressed."""
