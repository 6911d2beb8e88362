"""Exception types. Each carries the CLI exit code it maps to."""


class HeomGpError(Exception):
    exit_code = 1


class ConfigError(HeomGpError):
    exit_code = 2


class NonHermitianInput(HeomGpError, ValueError):
    pass


class PreconditionViolated(HeomGpError, ValueError):
    pass


class Divergence(HeomGpError, FloatingPointError):
    exit_code = 3


class DegeneracyEncountered(HeomGpError):
    exit_code = 4

    def __init__(self, message, tau=None):
        super().__init__(message)
        self.tau = tau


class OverlapTooSmall(HeomGpError):
    exit_code = 4


class NotConverged(HeomGpError):
    exit_code = 5


class TruncationInsufficient(NotConverged):
    pass


class PartialSweepFailure(HeomGpError):
    exit_code = 6
