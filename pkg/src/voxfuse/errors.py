"""Exception types shared across the package.

CLI exit codes: ConfigError -> 2, DependencyError -> 3, BudgetError and
other numeric failures -> 4.
"""


class VoxfuseError(Exception):
    """Base class for package-specific failures."""


class ConfigError(VoxfuseError):
    """Invalid configuration file, key, or value."""


class DependencyError(VoxfuseError):
    """A pipeline stage was run before its inputs were produced."""


class BudgetError(VoxfuseError):
    """A resource budget (voxel count) would be exceeded."""

    def __init__(self, message: str, required: int = 0, budget: int = 0):
        super().__init__(message)
        self.required = required
        self.budget = budget


class EmptyMaskError(VoxfuseError, ValueError):
    """A foreground mask contained no foreground pixels."""


class EmptyRangeError(VoxfuseError, ValueError):
    """A depth search range collapsed (e.g. cylinder fully behind camera)."""


class StageError(VoxfuseError):
    """A pipeline stage failed; message carries view/frame context."""
