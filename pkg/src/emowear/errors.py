"""Exception types shared across the pipeline.

Every error the library raises on bad input or degenerate data derives
from EmowearError, so callers (notably the CLI) can distinguish pipeline
failures from programming bugs.
"""


class EmowearError(Exception):
    """Base class for all pipeline errors."""


# --- ingestion ---

class MalformedRow(EmowearError):
    """A CSV row failed to parse. Carries the 1-based line number."""

    def __init__(self, line: int, detail: str = ""):
        self.line = line
        super().__init__(f"malformed row at line {line}" + (f": {detail}" if detail else ""))


class EmptyStream(EmowearError):
    """A sensor or label file contained no data rows."""


class NonMonotonicTime(EmowearError):
    """Timestamps decreased within one stream."""


class NoOverlap(EmowearError):
    """Streams (or labels and features) share no common time interval."""


class MissingChannel(EmowearError):
    """A required sensor channel is absent from the recording."""


class InvalidMarkers(EmowearError):
    """Phase markers violate their ordering constraints."""


class MarkerOutOfRange(EmowearError):
    """A phase marker lies outside the recorded time span."""


class ManifestError(EmowearError):
    """A session manifest is missing fields or points at missing files."""


# --- preprocessing ---

class SeriesTooShort(EmowearError):
    """Series shorter than the smoothing window."""


class EmptyMatrix(EmowearError):
    """Attempted to fit statistics on an empty matrix."""


class DimensionMismatch(EmowearError):
    """Column/shape mismatch between fitted state and data."""


# --- labels ---

class MissingChannelColumn(EmowearError):
    """A label export lacks one of the twelve emotion columns."""


class ChannelTooShort(EmowearError):
    """An emotion channel has fewer than two samples."""


class DegenerateRange(EmowearError):
    """Min-max scaling saw a constant training channel."""


# --- models ---

class SingularSystem(EmowearError):
    """Exactly collinear features in an unregularized least-squares fit."""


class NonFiniteLoss(EmowearError):
    """Network training loss became NaN or infinite."""


class NonFiniteGradient(EmowearError):
    """An optimizer step received NaN or infinite gradients."""


# --- evaluation ---

class ZeroVariance(EmowearError):
    """All target values equal; the r-squared score is undefined."""


class LengthMismatch(EmowearError):
    """Paired vectors have different lengths."""


class TooFewParticipants(EmowearError):
    """Leave-one-subject-out needs at least two participants."""


class FoldError(EmowearError):
    """A pipeline error inside one evaluation fold, annotated with its id."""


# --- analysis ---

class ConstantColumn(EmowearError):
    """Pearson correlation is undefined for a constant column."""


class RankDeficient(EmowearError):
    """Data has fewer nonzero principal directions than requested."""
