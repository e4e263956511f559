"""
Exceptions raised by tauber_games. Every class carries the exit status
the command line reports for it: 1 for an ill-formed game, 2 for
malformed input, 3 for numeric failures. `validate` returns violations
as a list; `InvalidGame` carries that list where a well formed game is
required.
"""

__all__ = ["TauberError", "InputError", "NumericError", "NonPositiveParameter",
           "GammaNotGreaterThanOne", "MassNotOne", "NegativeTime",
           "QuantileOutOfRange", "EmptyInterval", "BinCountTooSmall",
           "InvalidParameter", "ZeroTailMass", "DegenerateInterval",
           "NonPositiveDensityOnSupport", "NotPiecewiseConstant",
           "DensityParseError", "SchemaError", "UnknownInstance", "InvalidGame",
           "BadMatrix",
           "NumericalFailure", "TailNeverSmall", "HorizonTooShort", "NotAChain",
           "MissingReferenceFamily", "ConfigError"]


class TauberError(Exception):
    """Base class of all package errors"""
    exit_code = 3


class InputError(TauberError, ValueError):
    exit_code = 2


class NumericError(TauberError, ArithmeticError):
    exit_code = 3


#Density construction and calculus
class NonPositiveParameter(InputError):
    pass


class GammaNotGreaterThanOne(InputError):
    pass


class MassNotOne(InputError):
    pass


class NegativeTime(InputError):
    pass


class QuantileOutOfRange(InputError):
    pass


class EmptyInterval(InputError):
    pass


class BinCountTooSmall(InputError):
    pass


class InvalidParameter(InputError):
    pass


class ZeroTailMass(NumericError):
    pass


class DegenerateInterval(NumericError):
    pass


class NonPositiveDensityOnSupport(NumericError):
    pass


class NotPiecewiseConstant(NumericError):
    pass


class DensityParseError(InputError):
    def __init__(self, token, reason=""):
        self.token = token
        msg = "bad density token %r" % (token,)
        if reason:
            msg += ": " + reason
        super().__init__(msg)


#Games
class SchemaError(InputError):
    def __init__(self, path, reason):
        self.path = path
        super().__init__("%s: %s" % (path, reason))


class UnknownInstance(InputError):
    pass


class InvalidGame(TauberError, ValueError):
    exit_code = 1

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("game is not well formed: " + "; ".join(self.violations))


class BadMatrix(InputError):
    pass


#Values
class NumericalFailure(NumericError):
    pass


class TailNeverSmall(NumericError):
    pass


class HorizonTooShort(NumericError):
    pass


class NotAChain(NumericError):
    pass


#Harness
class MissingReferenceFamily(InputError):
    pass


class ConfigError(InputError):
    pass
