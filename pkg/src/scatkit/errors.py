"""Exception types shared across the toolkit."""


class ScatkitError(Exception):
    """Base class for all toolkit errors."""


class DiagramFormatError(ScatkitError):
    """A diagram or momentum document failed to parse."""


class DisconnectedDiagramError(ScatkitError):
    """The operation requires a connected diagram."""


class BackwardInTimeError(ScatkitError):
    """A space-time embedding would need a negative line scale factor."""


class ClosureError(ScatkitError):
    """An internal loop fails to close when embedding a diagram."""


class GaugeRankError(ScatkitError):
    """The gauge generators are rank-deficient at the given momenta."""

    def __init__(self, rank: int, expected: int):
        super().__init__(f"gauge basis rank {rank}, expected {expected}")
        self.rank = rank
        self.expected = expected


class NoRayError(ScatkitError):
    """No positive-scale realization exists, so there is no cone ray."""


class UnsupportedSurfaceError(ScatkitError):
    """The point appears to sit on several distinct singularity surfaces."""


class QuadratureError(ScatkitError):
    """An oscillatory integral cannot be resolved within the node budget."""


class HoleExcludedError(ScatkitError):
    """The displacement lies inside the excluded hole around the time axis."""


class TruncationError(ScatkitError):
    """Sampled data does not decay enough at the grid boundary."""


class GrowthError(ScatkitError):
    """An exponentially weighted integrand fails to decay at the box edge."""


class CliConfigError(ScatkitError):
    """Bad command-line inputs or configuration files."""
