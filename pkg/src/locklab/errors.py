"""Exception types shared across the package."""


class DomainError(ValueError):
    """Deformation gradient outside the admissible set (det F <= 0)."""


class ParameterError(ValueError):
    """Invalid material or solver parameters."""


class LockingViolation(ArithmeticError):
    """A guarded evaluation reached or crossed the locking bound.

    Attributes
    ----------
    margin : float
        ``limit - attained`` of the bounding invariant (<= 0 here).
    """

    def __init__(self, margin, message=None):
        self.margin = float(margin)
        super().__init__(message or f"locking bound violated (margin {self.margin:.6g})")


class SingularTangentError(ArithmeticError):
    """Second derivative of the energy is singular at the evaluation point."""


class EvaluationError(ArithmeticError):
    """A constitutive formula has no finite value at the requested point."""


class ElementInversionError(ArithmeticError):
    """Non-positive Jacobian at a quadrature point."""

    def __init__(self, element, J):
        self.element = element
        self.J = float(J)
        super().__init__(f"element {element} inverted (J = {self.J:.6g})")
