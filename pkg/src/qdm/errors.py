"""Exception hierarchy.

Every error raised by the library derives from :class:`QdmError`, which is a
``ValueError`` so callers that only care about bad input can catch that.
"""


class QdmError(ValueError):
    pass


# matrix core
class NotHermitian(QdmError):
    pass


class NotAntiHermitian(QdmError):
    pass


class NoConvergence(QdmError, ArithmeticError):
    pass


class DimensionMismatch(QdmError):
    pass


class NegativeEigenvalue(QdmError):
    pass


# bases and Bloch vectors
class BasisInvalid(QdmError):
    pass


class BasisMismatch(QdmError):
    pass


class NotDensityShape(QdmError):
    pass


class InvalidAngularMomenta(QdmError):
    pass


class HermiticityViolation(QdmError):
    pass


# dynamics
class DegenerateAmplitudes(QdmError):
    pass


class NonPhysicalInitialState(QdmError):
    pass


class StepTooLarge(QdmError):
    pass


class ModelMismatch(QdmError):
    pass


# two-qubit
class NonPhysical(QdmError):
    pass


class UnsupportedDims(QdmError):
    pass


# jarlskog / composite
class NotUnitVector(QdmError):
    pass


class IndexOutOfRange(QdmError):
    pass


class InvalidParams(QdmError):
    pass


class TraceMismatch(QdmError):
    pass


class BlockShapeMismatch(QdmError):
    pass


class OutOfRange(QdmError):
    pass


class NonPhysicalParameters(QdmError):
    pass


class InvalidSimplex(QdmError):
    pass
