"""Exception types shared across modules (the CLI maps them to exit codes)."""


class ResourceBudgetError(RuntimeError):
    """A requested computation exceeds the configured budget."""


class VerificationError(AssertionError):
    """A post-hoc verification of a construction failed."""
