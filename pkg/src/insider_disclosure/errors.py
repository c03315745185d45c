"""Exception taxonomy shared by every solver, the simulator and the CLI."""


class ModelError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(ModelError, ValueError):
    """Exogenous parameters outside the region where an equilibrium exists."""


class OutOfRangeK(ValidationError):
    pass


class NonPositiveVariance(ValidationError):
    pass


class ZeroPeriods(ValidationError):
    pass


class UnsupportedRegime(ValidationError):
    """No-disclosure equilibria are only solved for two auctions."""


class NumericFailure(ModelError, ArithmeticError):
    """A solver produced a quantity that cannot belong to a valid equilibrium."""


class NoSignChange(NumericFailure):
    pass


class SecondOrderViolation(NumericFailure):
    pass


class DenominatorCollapse(NumericFailure):
    pass


class NegativeRadicand(NumericFailure):
    pass


class NegativeNoiseVariance(NumericFailure):
    pass


class InsufficientPaths(ModelError, ValueError):
    pass
