"""Exception types raised by the engine."""


class EngineError(Exception):
    """Base class for all engine failures."""


class NonIntegralLeadingExponent(EngineError):
    """Eta quotient whose q-power sum(t*r)/24 is not a non-negative integer."""


class SeriesNotInvertible(EngineError):
    """Series inversion requested on a series with zero constant term."""


class EvenArgument(EngineError):
    """Odd-only arithmetic function called with an even argument."""


class CoprimalityViolation(EngineError):
    """Argument shares a prime with the level the function excludes."""


class NotFundamental(EngineError):
    """Discriminant fails the fundamental-discriminant test."""


class UnknownForm(EngineError):
    """Catalog lookup for a form or space name that is not registered."""


class CatalogError(EngineError):
    """Malformed catalog record, bad recipe, or failed construction."""

    def __init__(self, message: str, position: int = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class InsufficientTruncation(EngineError):
    """Input series is too short for the requested output range."""

    def __init__(self, required: int, available: int):
        super().__init__(
            f"input truncation {available} is too short, need at least {required}"
        )
        self.required = required
        self.available = available


class SignConditionViolated(EngineError):
    """Twist sign does not satisfy (-1)^k * twist > 0."""


class AdmissibilityViolated(EngineError):
    """Twist type does not match the level parity and no override was given."""


class Inconsistent(EngineError):
    """Linear system has no exact solution."""


class Underdetermined(EngineError):
    """Basis columns are linearly dependent on the sampled rows."""


class UnsupportedBasisElement(EngineError):
    """Basis element is neither an Eisenstein dilate nor a newform dilate."""


class ParseError(EngineError):
    """Malformed quadratic form, twist, or data-file text."""

    def __init__(self, message: str, text: str = "", position: int = None):
        if position is not None:
            message = f"{message} at position {position}: {text!r}"
        super().__init__(message)
        self.text = text
        self.position = position
