"""Exception hierarchy shared by all reidpipe modules."""


class ReidError(Exception):
    """Base class for all reidpipe errors."""


class FormatError(ReidError):
    """A file does not conform to its declared on-disk format."""


class DataError(ReidError):
    """Input data is structurally valid but semantically unusable."""


class ConfigError(ReidError):
    """Invalid configuration value or missing configuration."""


class DimError(ReidError):
    """Dimension mismatch between arrays that must agree."""


class NumericError(ReidError):
    """A numeric computation produced non-finite values."""


class ContractError(ReidError):
    """A caller violated a documented call contract."""
