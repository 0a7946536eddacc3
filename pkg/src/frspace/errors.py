"""Exception hierarchy."""


class FrspaceError(Exception):
    """Base class for all library errors."""


class JetError(FrspaceError, ValueError):
    pass


class ShapeMismatch(JetError):
    pass


class NotPositiveDefinite(JetError):
    pass


class NormOutOfRange(JetError):
    pass


class ChargeOutOfRange(JetError):
    pass


class BadRange(JetError):
    pass


class ZeroVector(FrspaceError, ValueError):
    pass


class SingularMetric(FrspaceError, ArithmeticError):
    pass


class DimensionNotTwo(FrspaceError, ValueError):
    pass


class RiemannianDegenerate(FrspaceError, ValueError):
    """Raised where a formula divides by A^i A_i, which vanishes when g = 0."""


class NotExactForm(FrspaceError, ValueError):
    pass


class ChargeNotConstant(FrspaceError, ValueError):
    pass


class PreconditionViolated(FrspaceError, ValueError):
    pass


class FieldError(FrspaceError, ValueError):
    pass


class ExpressionSyntaxError(FieldError):
    def __init__(self, message, line=1, column=1, where=None):
        self.line = line
        self.column = column
        self.where = where
        loc = f"{where}: " if where else ""
        super().__init__(f"{loc}line {line}, column {column}: {message}")


class DimensionMismatch(FieldError):
    pass


class AsymmetricMetric(FieldError):
    pass


class DomainError(FrspaceError, ArithmeticError):
    """An expression or trajectory left the domain where it is defined."""

    def __init__(self, message, last_state=None):
        super().__init__(message)
        self.last_state = last_state


class StepRejected(FrspaceError, RuntimeError):
    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory
