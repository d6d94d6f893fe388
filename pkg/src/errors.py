"""
Workbench Errors
Description: Exception hierarchy shared by every package of the workbench.

The CLI maps these onto exit statuses:
  - ConfigError, ArgumentError    -> 2 (usage)
  - any other WorkbenchError      -> 1
  - check violations             -> 3 (not an exception, see workbench_cli)
"""


class WorkbenchError(Exception):
    """Base class for all workbench errors."""


class ArgumentError(WorkbenchError, ValueError):
    """An argument violates the precondition of the operation it was passed to."""


class CapacityError(WorkbenchError):
    """The request is larger than the sieve, field or exhaustive-scan capacity."""


class DomainError(WorkbenchError, ValueError):
    """An estimate or criterion was applied outside its range of validity."""


class UnsupportedFieldError(DomainError):
    """Fields of characteristic 2 or 3 (p < 5) are not supported."""


class UncertifiedStructureError(WorkbenchError):
    """Sampled group-structure certification did not reach a unique answer."""


class InternalConsistencyError(WorkbenchError):
    """Two independent computations that must agree did not."""


class MissingRecordsError(WorkbenchError):
    """A verifier was run without the survey records it depends on."""


class CacheReadError(WorkbenchError):
    """A cache file could not be parsed."""

    def __init__(self, message: str, offset: int = -1):
        super().__init__(f"{message} (byte offset {offset})" if offset >= 0 else message)
        self.offset = offset


class CacheVersionError(CacheReadError):
    """A cache line was written with a different schema version."""


class ConfigError(WorkbenchError):
    """The command line does not describe a valid run."""
