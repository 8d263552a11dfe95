"""Exception hierarchy shared by the library and the command line front-end."""


class HolotransferError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1
    kind = "error"


class ConfigError(HolotransferError, ValueError):
    """Malformed input: bad sizes, unknown descriptors, schema violations."""

    exit_code = 2
    kind = "config"


class ValidationError(HolotransferError, ValueError):
    """Well-formed input that violates a mathematical precondition."""

    exit_code = 3
    kind = "validation"


class NumericalError(HolotransferError, ArithmeticError):
    """Non-finite values, eigensolver failure or an ambiguous eigenvalue match."""

    exit_code = 4
    kind = "numerical"
