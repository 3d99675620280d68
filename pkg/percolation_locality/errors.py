#!/usr/bin/env python3
"""
Exception hierarchy shared by every module of the laboratory
"""

from typing import Optional


class LocalityLabError(Exception):
    """Base class for all laboratory errors"""


class ResourceLimitError(LocalityLabError):
    """A configured size guard was exceeded (ball cap, isomorphism, law size)"""


class UnknownVertexError(LocalityLabError, KeyError):
    """Vertex is not part of the finite graph"""

    def __str__(self) -> str:
        return Exception.__str__(self)


class GenerationError(LocalityLabError):
    """Generators do not generate the group within the witness radius"""


class DegenerateSetError(LocalityLabError):
    """All generators of Z^2 are collinear"""


class NoQuotientError(LocalityLabError):
    """Group spec admits no Z^2 quotient by coordinate projection"""


class CapExceededError(LocalityLabError):
    """Target not reached within the radius cap"""


class NonPolynomialGrowthError(LocalityLabError):
    """Fitted growth exponent is not stable across the window"""


class SeparationError(LocalityLabError):
    """Seed point set is not separated at the requested scale"""


class EmptyFiberError(LocalityLabError):
    """Window contains no fiber point above a quotient net point"""


class QuasiIsometryError(LocalityLabError):
    """A sampled pair violates the quasi-isometry inequality"""


class MarginError(LocalityLabError):
    """Region is too small around a vertex for the requested event"""


class ConvergenceError(LocalityLabError):
    """Bisection bracket is not monotone"""

    def __init__(self, message: str, curve=None):
        super().__init__(message)
        self.curve = curve or []


class VertexSetMismatchError(LocalityLabError):
    """Two laws live on different vertex sets"""


class CertificationError(LocalityLabError):
    """A dependency certificate failed where one was required"""


class LiftExtensionError(LocalityLabError):
    """The lifted exploration could not be extended"""


class ConfigError(LocalityLabError):
    """Invalid experiment configuration, names the offending field"""

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field
        self.message = message


class SchemaMismatchError(LocalityLabError):
    """CSV columns do not match the requested schema or plot"""
