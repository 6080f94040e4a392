"""Exception types shared across the package."""


class ChestsegError(Exception):
    """Base class for errors raised by chestseg."""


class PgmError(ChestsegError):
    """Malformed or unsupported PGM image file."""


class ManifestError(ChestsegError):
    """Malformed sequence manifest or inconsistent frame set."""


class ConfigError(ChestsegError):
    """Invalid configuration value or unusable parameter combination."""


class PipelineError(ChestsegError):
    """Segmentation pipeline cannot run on the given input."""
