"""Exception types raised by the decomposition engines and I/O helpers."""


class Afd2dError(Exception):
    """Base class for all package errors."""


class DimensionError(Afd2dError, ValueError):
    """Two signals or arrays do not live on the same grid."""


class DomainError(Afd2dError, ValueError):
    """A parameter lies outside its admissible domain (e.g. ``|a| >= 1``)."""


class SingularNodeError(DomainError):
    """A sampling node hits a singularity of the sampled function."""


class NumericalFailure(Afd2dError, RuntimeError):
    """An engine could not continue (mapped to CLI exit status 3)."""


class EscalationLimitError(NumericalFailure):
    """Pre-OGA tried to raise an atom multiplicity beyond the configured cap."""


class DictionaryExhaustedError(NumericalFailure):
    """Every candidate atom already lies in the span of the selected ones."""
