"""Exception types shared across the package."""


class ValidationError(ValueError):
    """An input (ensemble spec, parameter, file) violates a stated constraint."""


class SizeLimitError(RuntimeError):
    """An exhaustive computation was refused because it exceeds the configured limit."""
