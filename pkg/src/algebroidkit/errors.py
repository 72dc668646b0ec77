"""Exception types shared across the kit."""

from __future__ import annotations


class KitError(Exception):
    """Base class for all kit errors."""


class DegreeError(KitError):
    """Degree bookkeeping violated (inhomogeneous mixing, wrong map degree)."""


class CapError(KitError):
    """Weight or arity cap mismatch / overflow."""


class BaseMismatch(KitError):
    """Operands live over different base algebras or carriers."""


class ParseError(KitError):
    """Model-file parsing failed; carries field provenance."""

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{message}" + (f" (at {location})" if location else ""))
