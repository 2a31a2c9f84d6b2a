__all__ = [
    "DiffusionBenchError",
    "SymmetryError",
    "TimeGridError",
    "CapabilityError",
    "EffectiveSampleSizeError",
    "NonFiniteError",
    "BoundError",
    "BatchError",
    "OutputError",
    "ConfigError",
]


class DiffusionBenchError(Exception):
    """
    Base class of all errors raised by this package.
    """


class SymmetryError(DiffusionBenchError):
    """
    Raised when a matrix expected to be symmetric is not, e.g. a Hessian
    estimate which was not symmetrized upstream.
    """

    def __init__(self, asymmetry: float, tolerance: float):
        super().__init__(
            f"Matrix is not symmetric: relative asymmetry {asymmetry:.3e} exceeds {tolerance:.1e}"
        )


class TimeGridError(DiffusionBenchError):
    """
    Raised when a horizon and step size do not define a valid time grid.
    """


class CapabilityError(DiffusionBenchError):
    """
    Raised when a scheme requires an oracle capability which the oracle
    doesn't provide, e.g. running {obj}`SchemeKind.SO` on a score-only oracle.
    """

    def __init__(self, oracle, capability: str):
        super().__init__(f"Oracle {oracle} does not provide {capability}")


class EffectiveSampleSizeError(DiffusionBenchError):
    """
    Raised by the Monte-Carlo oracle when the self-normalized weights
    collapse onto too few particles for the estimate to be trusted.
    """

    def __init__(self, ess_min: float, threshold: float, count: int):
        super().__init__(
            f"Effective sample size {ess_min:.2f} below {threshold:.1f} at {count} query point(s)"
        )


class NonFiniteError(DiffusionBenchError):
    """
    Raised when a log-density, state or estimate is not finite.
    """


class BoundError(DiffusionBenchError):
    """
    Raised when theorem constants are undefined for the given regularity
    constants.
    """


class BatchError(DiffusionBenchError):
    """
    Raised by the batch runner when one or more trajectories fail.
    Failures are aggregated so the user sees all of them at once.
    """

    errors: list[str]

    def __init__(self, errors: list[str]):
        self.errors = errors
        errors_str = "\n".join([e for e in errors])
        super().__init__(f"Errors found while running batch:\n{errors_str}")


class OutputError(DiffusionBenchError):
    """
    Raised when results cannot be written.
    """

    def __init__(self, path, cause: Exception):
        super().__init__(f"Failed to write {path}: {cause}")


class ConfigError(DiffusionBenchError):
    """
    Raised when an experiment configuration is invalid, with one message
    per offending field.
    """

    errors: list[str]

    def __init__(self, errors: list[str]):
        self.errors = errors
        errors_str = "\n".join([e for e in errors])
        super().__init__(f"Invalid configuration:\n{errors_str}")
