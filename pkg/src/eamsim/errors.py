"""Exception hierarchy shared by the library and the command line runner."""


class EamsimError(Exception):
    """Base class for every error raised by eamsim."""


class UnsupportedConfiguration(EamsimError, ValueError):
    """Requested model is outside what the builders support (e.g. even arm count)."""


class EamDomainError(EamsimError, ValueError):
    """An EAM label lies outside the symmetric window of its molecule."""


class ContractViolation(EamsimError):
    """A numerical contract (Hermiticity, normalization, PSD, ...) was broken."""


class BasisMismatch(ContractViolation):
    """Two objects that must share a labeled basis do not."""


class ConfigError(EamsimError):
    """Invalid scenario configuration; message carries line/field diagnostics."""
