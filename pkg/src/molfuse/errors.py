"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: configuration/usage problems
exit 2, data problems exit 3, numeric/runtime faults exit 4.
"""


class MolfuseError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(MolfuseError):
    """Bad configuration: unknown keys, missing env vars, invalid values."""


class DataError(MolfuseError):
    """Bad input data: missing columns, unusable datasets, bad containers."""


class ParseError(DataError):
    """SMILES parse failure. Carries the byte offset of the offending token."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class ShapeError(MolfuseError):
    """Tensor shapes incompatible with the requested operation."""


class MaskError(MolfuseError):
    """A mask left no entries to operate on (e.g. fully-masked softmax slice)."""


class NumericError(MolfuseError):
    """Non-finite values or other numeric faults during computation."""
