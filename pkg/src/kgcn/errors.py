class ParameterError(ValueError):
    """Invalid argument value or shape."""


class CapacityError(ValueError):
    """Problem instance too large for the requested method."""


class FormatError(ValueError):
    """Malformed graph or model file."""


class ContractViolation(RuntimeError):
    """An internal invariant was broken (e.g. an infeasible schedule)."""


class TrainingDiverged(RuntimeError):
    """Training produced a non-finite cost or gradient."""
