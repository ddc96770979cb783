"""Exception types shared across the package."""


class JDMError(ValueError):
    """Base class for all errors raised by jdmchain."""


class NonIntegralClassSize(JDMError):
    def __init__(self, class_index: int, degree: int, numerator: int):
        self.class_index = class_index
        self.degree = degree
        self.numerator = numerator
        super().__init__(
            f"class {class_index} (degree {degree}): size {numerator}/{degree} is not an integer"
        )


class NotGraphical(JDMError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("joint degree matrix is not graphical: " + "; ".join(self.violations))


class InconsistentDegrees(JDMError):
    pass


class JdmMismatch(JDMError):
    pass


class Infeasible(JDMError):
    pass


class HalfRegularityViolation(JDMError):
    pass


class DimensionOverflow(JDMError):
    pass


class NotSymmetric(JDMError):
    pass


class NotClosed(JDMError):
    pass


class EmptyOrFull(JDMError):
    pass


class TooLarge(JDMError):
    pass


class CapExceeded(JDMError):
    pass


class FormatError(JDMError):
    pass
