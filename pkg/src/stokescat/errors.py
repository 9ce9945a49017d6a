"""Exception hierarchy for stokescat."""


class StokescatError(Exception):
    """Base class for all stokescat errors."""


class NotSquare(StokescatError):
    pass


class IndexOutOfBounds(StokescatError):
    pass


class NearDegenerateSpectrum(StokescatError):
    pass


class SingularPivot(StokescatError):
    def __init__(self, block_index, message=None):
        self.block_index = block_index
        super().__init__(message or f"singular leading block at index {block_index}")


class NonCommutingFamily(StokescatError):
    pass


class DegenerateJointSpectrum(StokescatError):
    pass


class PoleOnSpectrum(StokescatError):
    pass


class PoleAtNonPositiveInteger(StokescatError):
    pass


class ZeroArgument(StokescatError):
    pass


class BetaAtPole(StokescatError):
    pass


class IntegrationFailure(StokescatError):
    pass


class PathCrossesCut(StokescatError):
    pass


class ResonantSystem(StokescatError):
    def __init__(self, pair, message=None):
        self.pair = pair
        super().__init__(message or f"resonant eigenvalue pair {pair}")


class NotInGL0(StokescatError):
    pass


class GammaPole(StokescatError):
    pass


class FiberwisePole(StokescatError):
    pass


class DimensionOverflow(StokescatError):
    pass


class RootCollision(StokescatError):
    pass


class CollidingEigenvalues(StokescatError):
    pass


class ShapeMismatch(StokescatError):
    pass


class SchemaViolation(StokescatError):
    def __init__(self, pointer, message):
        self.pointer = pointer
        super().__init__(f"{pointer}: {message}")
