class DomainError(ValueError):
    """Input outside the domain of an operation."""


class DegenerateFrameError(DomainError):
    """Pushed-forward frame is not linearly independent."""
