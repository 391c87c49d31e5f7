"""Exception types shared across the package."""

from __future__ import annotations


class FmriAlignError(Exception):
    """Base class for all package errors."""


class ValidationError(FmriAlignError):
    """Invalid user input, configuration, or file contents."""


class ShapeMismatchError(ValidationError):
    """A named array does not have the shape its contract requires."""

    def __init__(self, name: str, expected, actual):
        self.name = name
        self.expected = tuple(expected)
        self.actual = tuple(actual)
        super().__init__(f"shape mismatch for '{name}': expected {self.expected}, got {self.actual}")


class NotPositiveDefiniteError(FmriAlignError):
    """Cholesky factorization hit a non-positive pivot.

    `pivot` is the zero-based index of the failing leading minor.
    """

    def __init__(self, pivot: int, hint: str = ""):
        self.pivot = pivot
        msg = f"matrix is not positive definite (failing pivot index {pivot})"
        if hint:
            msg += f"; {hint}"
        super().__init__(msg)


class AsymmetricMatrixError(ValidationError):
    """Matrix violates the symmetry tolerance of a symmetric-only routine."""


class BundleError(ValidationError):
    """Dataset or embedding bundle is malformed or inconsistent."""


class CheckpointError(ValidationError):
    """Checkpoint/alignment container is corrupt or inconsistent."""


class MissingArtifactError(ValidationError):
    """A required file (model, alignment, bundle) is absent."""

    def __init__(self, artifact: str, path):
        self.artifact = artifact
        self.path = str(path)
        super().__init__(f"missing {artifact}: {self.path}")


class NonFiniteError(FmriAlignError):
    """A non-finite value appeared where the contract forbids it."""

    def __init__(self, message: str, *, stage: str | None = None, block: int | None = None, parameter: str | None = None):
        self.stage = stage
        self.block = block
        self.parameter = parameter
        super().__init__(message)


class TrainingDivergedError(FmriAlignError):
    """Training loss became non-finite; carries the iteration and partial loss curve."""

    def __init__(self, iteration: int, loss_curve):
        self.iteration = iteration
        self.loss_curve = list(loss_curve)
        super().__init__(f"non-finite training loss at iteration {iteration}")
