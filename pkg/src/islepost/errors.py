"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, DataError -> 3,
NumericError -> 4.
"""


class IslepostError(Exception):
    """Base class for package-specific failures."""


class ConfigError(IslepostError):
    """Invalid or inconsistent configuration (bad keys, missing columns, ...)."""


class DataError(IslepostError):
    """Malformed data files or schema mismatches."""


class NumericError(IslepostError):
    """Degenerate numerical situations (zero-variance input, empty OOB sets, ...)."""
