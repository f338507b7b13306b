"""Exception types shared across modules (the CLI maps them to exit codes)."""


class InputError(ValueError):
    """Invalid input data or arguments."""


class CapExceeded(InputError):
    """A request would exceed an enumeration or memory cap."""


class CrossCheckError(RuntimeError):
    """An independent oracle disagreed with a computed result."""
