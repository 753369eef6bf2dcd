"""Error types shared across the package."""


class InvariantViolation(RuntimeError):
    """An identity the construction guarantees failed to hold.

    Raised when an internal cross-check (exact divisibility, integrality of
    divisor coefficients, a degree identity, ...) fails; this always means a
    bug in the implementation or in the inputs, never a normal error path.
    """
