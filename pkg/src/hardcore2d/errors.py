"""Shared exception types."""


class CapacityError(RuntimeError):
    """A request exceeds a hard size cap (state space, enumeration depth)."""


class CoalescenceTimeout(RuntimeError):
    """Coupling from the past hit its sweep cap before the chains merged."""
