"""Exception types shared across the package."""


class CapacityError(ValueError):
    """Requested size exceeds what an algorithm can handle (e.g. exact mode caps)."""


class NumericError(RuntimeError):
    """A numerical routine failed to converge to its tolerance."""


class VerificationError(RuntimeError):
    """A verified property (table invariant, expected crossover, bracket) failed."""
