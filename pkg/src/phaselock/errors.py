"""Exception hierarchy. Every error carries a machine-readable ``code``."""


class PhaselockError(Exception):
    code = "phaselock_error"


class ConfigError(PhaselockError, ValueError):
    code = "config_error"

    def __init__(self, message, field=None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class NoConvergence(PhaselockError):
    code = "no_convergence"


class DegenerateOrbit(PhaselockError):
    code = "degenerate_orbit"


class GridMismatch(PhaselockError, ValueError):
    code = "grid_mismatch"


class InsufficientSamples(PhaselockError, ValueError):
    code = "insufficient_samples"


class DegenerateContinuum(PhaselockError):
    code = "degenerate_continuum"


class AmbiguousEvent(PhaselockError):
    code = "ambiguous_event"


class IoFailure(PhaselockError, OSError):
    code = "io_failure"


class StepTooLarge(PhaselockError, ValueError):
    code = "step_too_large"


class NonFinite(PhaselockError, FloatingPointError):
    code = "non_finite"


class NotLocked(PhaselockError):
    code = "not_locked"


class NoMatch(PhaselockError):
    code = "no_match"
