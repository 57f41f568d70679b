"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: input problems exit 1, numeric
failures exit 2, policy refusals exit 3.
"""


class DscoreError(Exception):
    """Base class for all toolkit errors."""


class InputError(DscoreError):
    """Bad input data or configuration (exit code 1)."""


class ParseError(InputError):
    """A file violated its documented schema; message carries line numbers."""


class IncompleteJudgmentsError(InputError):
    """A comparison set is missing pairs required to build a matrix."""


class EmptyCohortError(InputError):
    """No responses remain for aggregation (empty input or all filtered out)."""


class CoverageError(InputError):
    """Models were not scored on identical scenario sets."""


class ConflictError(InputError):
    """Two sources supplied the same feature (e.g. a static profile file
    declaring a traffic-derived feature)."""


class VersionMismatchError(InputError):
    """Artifacts built against different taxonomy versions were combined."""


class DegenerateDataError(InputError):
    """Data without enough variation for the requested statistic
    (constant series, zero variance, zero-norm vector)."""


class ConvergenceError(DscoreError):
    """An iterative numeric routine failed to converge (exit code 2)."""

    def __init__(self, message: str, iterations: int | None = None):
        super().__init__(message)
        self.iterations = iterations


class InsufficientProfileError(DscoreError):
    """Too much feature-weight mass falls on missing values; scoring is
    refused rather than extrapolated (exit code 3)."""

    def __init__(self, message: str, missing: list[str] | None = None):
        super().__init__(message)
        self.missing = list(missing or [])
