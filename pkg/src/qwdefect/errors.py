"""Exception hierarchy.

Everything numerical derives from :class:`QWalkError` so the CLI can map it to
a single exit code; configuration problems use :class:`ConfigError`.
"""


class QWalkError(ValueError):
    """Base class for numerical-domain errors."""


class DomainError(QWalkError):
    """Parameter outside the validated domain (e.g. coin angle)."""


class OutOfBandError(QWalkError):
    """No propagating mode at the requested quasi-energy (band gap)."""


class DegenerateModeError(QWalkError):
    """Plane-wave spinor normalization vanishes."""


class BandEdgeError(QWalkError):
    pass


class SingularPointError(QWalkError):
    """Closed form evaluated inside its removable-singularity window."""


class DirectionError(QWalkError):
    """Incident momentum moves the wrong way for the declared direction."""


class SingularMatrixError(QWalkError):
    pass


class ResonanceError(QWalkError):
    pass


class NonRealDispersionError(QWalkError):
    pass


class WindowTooSmallError(QWalkError):
    pass


class SupportOverflowError(QWalkError):
    pass


class BoundaryContaminationError(QWalkError):
    """Amplitude reached the edge of the finite lattice."""


class InsufficientStepsError(QWalkError):
    pass


class ConfigError(ValueError):
    """Invalid run configuration; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str, code: str = "E_CONFIG"):
        super().__init__(f"[{code}] {field}: {message}")
        self.field = field
        self.code = code
