"""Shared exception types."""


class BudgetExceededError(RuntimeError):
    """An exact enumeration or construction would exceed its configured budget."""


class ImpossibleConfigurationError(ValueError):
    """A conditional law was requested for a neighbor configuration of probability zero."""
