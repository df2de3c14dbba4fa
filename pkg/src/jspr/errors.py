"""Exception types shared across the package."""


class SingularProjectionError(RuntimeError):
    """Selected dictionary columns are (nearly) linearly dependent.

    Raised instead of silently regularizing when the Gram matrix of the
    selected columns has condition estimate above 1e12 or fails to factor.
    """


class EnumerationTooLargeError(ValueError):
    """An exhaustive enumeration would exceed its configured cap."""


class ConfigError(ValueError):
    """Invalid experiment configuration; message names the line and key."""
