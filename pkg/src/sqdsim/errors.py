"""Exception hierarchy shared by the simulator, harness and CLI."""


class SQDError(Exception):
    """Base class for every error raised by sqdsim."""


class ConfigError(SQDError, ValueError):
    """Invalid configuration, flag value or malformed input."""


class ProtocolError(SQDError):
    """A protocol precondition was violated during a run."""


class ProtocolAbort(SQDError):
    """A run terminated before both parties decoded their messages.

    The partially filled outcome is attached so callers can still inspect
    the transcript and check statistics.
    """

    def __init__(self, phase, outcome=None, message=None):
        self.phase = phase
        self.outcome = outcome
        super().__init__(message or f"protocol aborted at {phase}")


class ThresholdAbort(ProtocolAbort):
    """A security check measured an error rate at or above its threshold."""


class InsufficientZPhotons(ProtocolAbort):
    """Fewer than N Z-basis photons were left for Bob to encode on."""
