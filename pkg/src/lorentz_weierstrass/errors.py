"""Exception hierarchy shared by all modules."""


class LorentzError(Exception):
    """Base class for every error raised by this package."""


class ExprSyntaxError(LorentzError, ValueError):
    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class DomainError(LorentzError, ValueError):
    pass


class SingularMatrix(LorentzError, ValueError):
    pass


class NotSL2(LorentzError, ValueError):
    pass


class DegenerateMetric(LorentzError, ValueError):
    pass


class MissingDecomposition(LorentzError, ValueError):
    pass


class NotNull(LorentzError, ValueError):
    pass


class ZeroDenominator(LorentzError, ZeroDivisionError):
    pass


class NonPositiveFrameDet(LorentzError, ValueError):
    pass


class SignObstruction(LorentzError, ValueError):
    pass


class EquatorSingularity(LorentzError, ValueError):
    pass


class NorthPole(LorentzError, ValueError):
    pass


class NotOnSphere(LorentzError, ValueError):
    pass


class StepRejected(LorentzError, ArithmeticError):
    pass


class SignatureError(LorentzError, ValueError):
    pass


class ConstraintViolation(LorentzError, ValueError):
    pass


class UnknownName(LorentzError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class DataError(LorentzError, ValueError):
    """Weierstrass data with a function depending on the wrong variable."""


class CurvatureMismatch(LorentzError, ArithmeticError):
    """The conformal and classical mean-curvature formulas disagree."""
