"""Exception hierarchy shared by all modules."""


class NanofiberFPError(Exception):
    """Base class for all library errors."""


class DomainError(NanofiberFPError, ValueError):
    """An argument lies outside the domain of the operation."""


class NoGuidedModeError(NanofiberFPError):
    """No sign change of the characteristic equation on the search bracket."""


class AmbiguousRootError(NanofiberFPError):
    """More than one HE11 candidate root was found."""

    def __init__(self, message, roots):
        super().__init__(message)
        self.roots = list(roots)


class NonphysicalGainError(DomainError):
    """Round-trip amplitude at or above unity."""


class InconsistentInputsError(DomainError):
    """Measured quantities imply negative loss or gain."""


class IncompleteModelError(NanofiberFPError):
    """A required model quantity (e.g. a cross-section) is missing."""


class InsufficientCalibrationError(NanofiberFPError):
    """Too few etalon fringes to build a frequency axis."""


class ScanDirectionError(NanofiberFPError):
    """Raw fringe positions are not strictly monotone."""


class FitFailureError(NanofiberFPError):
    """Nonlinear least squares did not converge."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class DataFormatError(NanofiberFPError):
    """A data or config file could not be parsed."""


class BoundaryWarning(UserWarning):
    """A fitted parameter ended at one of its bounds."""


class RootAmbiguityWarning(UserWarning):
    """Additional guided-mode roots exist besides the selected one."""
