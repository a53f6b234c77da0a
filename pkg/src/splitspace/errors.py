"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class SplitSpaceError(Exception):
    """Base class for all errors raised by splitspace."""


class MalformedPartition(SplitSpaceError, ValueError):
    pass


class AmbientMismatch(SplitSpaceError, ValueError):
    pass


class IncompatibleSplits(SplitSpaceError):
    """Raised by the tree builder when two splits cannot coexist in a tree."""

    def __init__(self, first, second):
        self.pair = (first, second)
        super().__init__(f"splits {first} and {second} are not compatible")


class MalformedMatrix(SplitSpaceError, ValueError):
    pass


class RepresentationError(SplitSpaceError):
    """A split is not circular for the requested ordering."""

    def __init__(self, split, ordering):
        self.split = split
        self.ordering = ordering
        super().__init__(f"split {split} is not circular for ordering {ordering}")


class IllegalTwist(SplitSpaceError):
    def __init__(self, chord, crossing):
        self.chord = chord
        self.crossing = crossing
        super().__init__(f"chord {chord} crosses diagonal {crossing}")


class SplitIndexError(SplitSpaceError, IndexError):
    """Raised when a trivial split is given a coordinate index."""


class CapacityError(SplitSpaceError):
    """An exhaustive enumeration was requested above its configured bound."""

    def __init__(self, n: int, bound: int, what: str = "enumeration"):
        self.n = n
        self.bound = bound
        super().__init__(
            f"{what} for n={n} exceeds the exhaustive bound {bound}; "
            f"raise it with --n-max if you can afford the run time"
        )


class InfeasibleFit(SplitSpaceError):
    """No nonnegative split weighting reproduces the matrix."""

    def __init__(self, residual, offending, weights=None):
        self.residual = residual
        self.offending = offending
        self.weights = weights
        super().__init__(
            f"no nonnegative circular weighting: residual={residual}, "
            f"{len(offending)} offending split(s)"
        )


class DecodeError(SplitSpaceError):
    """The point is not in the image of the barycentric embedding."""


class ConsistencyError(SplitSpaceError, AssertionError):
    """An internal invariant failed; indicates a bug rather than bad input."""
