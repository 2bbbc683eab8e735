"""Exception hierarchy shared by the library and the command line."""


class BDChainError(Exception):
    """Base class for every error raised by bdchain."""


class DomainError(BDChainError, ValueError):
    """An argument lies outside the domain of the operation."""


class InvalidChainError(BDChainError, ValueError):
    """Edge weight or measure is not strictly positive at an evaluated index."""


class SpecFileError(BDChainError, ValueError):
    """A chain specification file could not be parsed."""


class CapExceededError(DomainError):
    """Composition enumeration was asked for an index above the configured cap."""


class DeconvolutionError(DomainError):
    """The triangular deconvolution has a zero pivot."""


class NoPositiveSolutionError(BDChainError):
    """The forward solution is not strictly positive on the requested window."""


class CertificateError(BDChainError, AssertionError):
    """A tail certificate contradicts the exactly inspected terms (internal bug)."""
