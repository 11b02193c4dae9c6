"""Exception types shared across the package.

The CLI maps these onto its exit-code contract: usage problems exit 2,
violated internal invariants exit 3, infeasible-scale refusals exit 4.
"""


class OrbitlabError(Exception):
    """Base class for all orbitlab errors."""


class DimensionMismatchError(OrbitlabError):
    """Point dimension or field does not match the map."""


class NonFiniteError(OrbitlabError):
    """Evaluation produced (or received) a non-finite value.

    ``step`` is the iteration index at which the overflow occurred, or
    None when the offending value was an input.
    """

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class InfeasibleScaleError(OrbitlabError):
    """A configured cap (iterate degree, split count, ...) was exceeded."""


class DegreeCapError(InfeasibleScaleError):
    """Symbolic iterate degree D**k exceeds the configured cap."""


class FlatDegeneracyError(OrbitlabError):
    """Displacement vanishes to the map's full degree at a fixed point."""


class InconsistentOrbitError(OrbitlabError):
    """A point's image matches no point in the supplied period-n set."""


class NonIsolatedContinuumError(OrbitlabError):
    """The fixed-point equation of the iterate vanished identically.

    Every point is then periodic and nothing is isolated; counts in the
    isolated sense do not exist for this (map, period) pair.
    """


class ZeroResultantError(OrbitlabError):
    """The eliminant vanished identically (degenerate leading coefficients)."""


class ZeroSliceError(OrbitlabError):
    """A unit-modulus specialization of the eliminant is identically zero.

    This would contradict the positive-codimension property the elimination
    pipeline exists to certify, so it is a hard failure.
    """


class InvariantViolation(OrbitlabError):
    """A checked internal invariant (e.g. the Bezout ceiling) failed."""


class FlaggedCensusError(OrbitlabError):
    """An operation that needs exact counts met a flagged census row."""
