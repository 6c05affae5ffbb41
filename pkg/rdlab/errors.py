"""Exception hierarchy shared by all rdlab modules.

Each error carries the process exit code the CLI maps it to:
2 usage, 3 numerical, 4 IO, 5 divergence.

Errors with their own constructor arguments rebuild from those arguments
when unpickled, so they cross process-pool boundaries intact.
"""

from typing import Optional


class RdLabError(Exception):
    """Base class for all rdlab errors."""

    exit_code: int = 1


class NonConvergenceError(RdLabError):
    """A truncated series did not reach its tail tolerance."""

    exit_code = 3

    def __init__(self, terms_used: int, tail_bound: float):
        self.terms_used = terms_used
        self.tail_bound = tail_bound
        super().__init__(
            f"Series did not converge after {terms_used} terms (tail bound {tail_bound:.3e})"
        )

    def __reduce__(self):
        return type(self), (self.terms_used, self.tail_bound)


class SingularSystemError(RdLabError):
    """A tridiagonal elimination hit a vanishing pivot."""

    exit_code = 3

    def __init__(self, row: int, pivot: float):
        self.row = row
        self.pivot = pivot
        super().__init__(f"Singular tridiagonal system: pivot {pivot:.3e} at row {row}")

    def __reduce__(self):
        return type(self), (self.row, self.pivot)


class OutOfDomainError(RdLabError):
    """A query point lies outside the space-time domain of a solution."""

    exit_code = 2


class DegenerateFeatureError(RdLabError):
    """A feature column is constant, so it cannot be normalized."""

    exit_code = 3

    def __init__(self, feature: str):
        self.feature = feature
        super().__init__(f"Feature '{feature}' is constant on the training split")

    def __reduce__(self):
        return type(self), (self.feature,)


class EmptyInputError(RdLabError):
    """A metric was asked to summarize an empty set."""

    exit_code = 2


class MalformedFileError(RdLabError):
    """A dataset or checkpoint file could not be parsed."""

    exit_code = 4

    def __init__(self, path: str, reason: str, line: Optional[int] = None):
        self.path = path
        self.reason = reason
        self.line = line
        where = f"{path}:{line}" if line is not None else path
        super().__init__(f"Malformed file {where}: {reason}")

    def __reduce__(self):
        return type(self), (self.path, self.reason, self.line)


class VersionMismatchError(RdLabError):
    """A checkpoint was written by an incompatible format version."""

    exit_code = 4

    def __init__(self, found: object, expected: int):
        self.found = found
        self.expected = expected
        super().__init__(f"Checkpoint format version {found!r} is not supported (expected {expected})")

    def __reduce__(self):
        return type(self), (self.found, self.expected)


class NonFiniteError(RdLabError):
    """Network activations or losses stopped being finite (training diverged)."""

    exit_code = 5

    def __init__(self, message: str, epoch: Optional[int] = None, batch: Optional[int] = None):
        self.message = message
        self.epoch = epoch
        self.batch = batch
        if epoch is not None:
            message = f"{message} (epoch {epoch}, batch {batch})"
        super().__init__(message)

    def __reduce__(self):
        return type(self), (self.message, self.epoch, self.batch)
