"""Exception hierarchy shared by every stage of the test pipeline."""


class KCMError(Exception):
    """Base class for all errors raised by kcmtest."""


class DataError(KCMError, ValueError):
    """Malformed or inadmissible input data (shapes, ranks, CSV cells)."""


class NumericalError(KCMError, ArithmeticError):
    """A numerical routine failed or hit a degenerate configuration."""
