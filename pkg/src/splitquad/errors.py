"""Exception types shared by all modules.

The CLI maps these onto exit codes: usage/argument errors -> 2,
capability/budget/accuracy errors -> 3.
"""


class ArgumentError(ValueError):
    """Bad input to an operation (dimension mismatch, invalid range, ...)."""


class CapabilityError(RuntimeError):
    """The request exceeds a configured cost cap or an unimplemented regime."""


class AccuracyError(RuntimeError):
    """A numerical routine could not certify its target accuracy."""
