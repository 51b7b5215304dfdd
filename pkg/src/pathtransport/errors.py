"""Exception hierarchy.

Input/contract violations derive from :class:`TransportError` (a
``ValueError``); numerical breakdowns derive from :class:`NumericalError`
(an ``ArithmeticError``). The CLI maps the two families to different exit
codes.
"""


class TransportError(ValueError):
    pass


class DomainError(TransportError):
    """A parameter or sub-interval lies outside a path's domain."""


class JunctionError(TransportError):
    """Canonical product of paths whose endpoints do not meet."""


class CompositionError(TransportError):
    """Composing transport matrices whose parameters do not chain."""


class LoopError(TransportError):
    """A Wilson loop was requested along an open path."""


class RankError(TransportError):
    """Tensor rank or slot mismatch."""


class NumericalError(ArithmeticError):
    pass


class SingularMatrixError(NumericalError):
    """A matrix that must be invertible is singular beyond the conditioning threshold."""


class NonFiniteError(NumericalError):
    """Non-finite values appeared while evaluating coefficients or integrating."""


class GroupInvariantError(NumericalError):
    """A group element drifted off its group beyond tolerance."""
