"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class ArbcheckError(Exception):
    """Base class for all library errors."""


# --- probability space / filtration construction ---

class ZeroProbability(ArbcheckError):
    pass


class NotNormalized(ArbcheckError):
    pass


class DuplicateLabel(ArbcheckError):
    pass


class ZeroDensity(ArbcheckError):
    pass


class NotAPartition(ArbcheckError):
    pass


class NotRefining(ArbcheckError):
    pass


# --- trade map construction / evaluation ---

class ConventionViolation(ArbcheckError):
    pass


class FrictionSignViolation(ArbcheckError):
    pass


class SignInfeasible(ArbcheckError):
    pass


class SpreadViolation(ArbcheckError):
    pass


class NonPositiveBid(ArbcheckError):
    pass


class DiagonalNotOne(ArbcheckError):
    pass


class NonPositivePrice(ArbcheckError):
    pass


class NegativeCost(ArbcheckError):
    pass


class NonPositiveRate(ArbcheckError):
    pass


class UnknownKind(ArbcheckError):
    pass


# --- linear programming ---

class MalformedProgram(ArbcheckError):
    pass


class InternalInvariantViolation(ArbcheckError):
    """A produced certificate failed its own re-verification: a bug, never bad input."""


# --- cones / arbitrage checks ---

class SizeGuardExceeded(ArbcheckError):
    pass


class KernelMismatch(ArbcheckError):
    pass


class DimensionMismatch(ArbcheckError):
    pass


class EfNotEstablished(ArbcheckError):
    pass


# --- cli / model files ---

class ParseError(ArbcheckError):
    def __init__(self, message: str, where: str = ""):
        super().__init__(f"{message}" + (f" (at {where})" if where else ""))
        self.where = where


class UnknownClaim(ArbcheckError):
    pass


class NoKernel(ArbcheckError):
    pass
