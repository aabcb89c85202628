"""Shared exception types."""


class ChannelLabError(Exception):
    """Base class for package-specific failures."""


class InternalInconsistencyError(ChannelLabError):
    """Numerics contradict a structural guarantee (indicates a numerical failure)."""


class HypothesisViolation(ChannelLabError, ValueError):
    """The input fails a documented hypothesis of the requested analysis."""
