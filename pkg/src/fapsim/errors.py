"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """An argument violates an operation's preconditions (shape, range, missing parameter)."""


class DomainError(ArithmeticError):
    """A numerically well-formed input lies outside an operation's mathematical domain."""


class DegenerateChannelError(DomainError):
    """The channel (or singular-value profile) carries no usable signal energy."""
