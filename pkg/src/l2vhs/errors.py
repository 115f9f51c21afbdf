class L2Error(ValueError):
    """Base class for all input and domain errors raised by the package."""


class InputError(L2Error):
    pass


class RelationError(L2Error):
    pass


class NotQuasiUnitaryError(L2Error):
    pass


class IrrationalRotationError(L2Error):
    pass


class NotInvertibleError(L2Error):
    pass


class NotNilpotentError(L2Error):
    pass


class NotUnipotentError(L2Error):
    pass


class GroupError(L2Error):
    pass


class CoveringError(L2Error):
    pass


class ComplexError(L2Error):
    """d o d != 0, non-equivariant maps, non-chain maps."""


class NotClosedError(L2Error):
    pass


class ObstructionError(L2Error):
    def __init__(self, g0, message=None):
        self.g0 = g0
        super().__init__(message or f"constant dtheta coefficient g0={g0} cannot be integrated at this weight")


class ExcludedWeightError(L2Error):
    pass


class InconsistentLocalTypeError(L2Error):
    pass


class InsufficientSamplesError(L2Error):
    pass


class InvariantFailure(RuntimeError):
    """An identity that must hold failed; signals a bug rather than bad input."""
