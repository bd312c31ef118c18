"""Exception taxonomy shared by every stage of the pipeline.

``DataError`` subclasses indicate problems with input data (exit code 65 at
the CLI); ``InternalError`` subclasses indicate bugs or I/O failures on our
side (exit code 70). Missing input files surface as the interpreter's own
``FileNotFoundError`` and map to exit code 66.
"""


class DriveTriadError(Exception):
    """Base class for all errors raised by this package."""


class DataError(DriveTriadError):
    """Input data is malformed, inconsistent, or unusable."""


class InternalError(DriveTriadError):
    """Invariant violation or environment failure, not a data problem."""


# --- track logs / geodesy ---------------------------------------------------

class EmptyTrack(DataError):
    """GPX input contained no track points."""


class MissingTimestamp(DataError):
    """A track point has no time element."""


class NonMonotoneTrack(DataError):
    """Track point timestamps decrease."""


class OutOfTrackSpan(DataError):
    """Queried time lies outside the track span beyond tolerance."""


class DegenerateBearing(DataError):
    """Bearing requested between coincident points."""


# --- transcripts / sidecars -------------------------------------------------

class ParseError(DataError):
    """Input bytes could not be parsed into the expected structure."""


class EncodingError(DataError):
    """Input bytes are not valid UTF-8."""


class EmptyTranscript(DataError):
    """Transcript contained no usable segments."""


class InvalidFps(DataError):
    """Video sidecar declares a non-positive frame rate."""


class InvalidAnchor(DataError):
    """Absolutized timestamp would be negative."""


# --- classification ---------------------------------------------------------

class EmptyInstruction(DataError):
    """Instruction text is empty or whitespace-only."""


class LexiconError(DataError):
    """Lexicon override document is malformed."""


# --- synchronization / segmentation ----------------------------------------

class BeforeVideoStart(DataError):
    """Queried time precedes the video start."""


class AfterVideoEnd(DataError):
    """Computed frame index is past the last frame."""


class NoUsableEvents(DataError):
    """Every instruction fell outside the usable time range."""


class InsufficientGeometry(DataError):
    """Too few non-degenerate points to derive a bearing change."""


# --- emission ---------------------------------------------------------------

class InternalOrderingError(InternalError):
    """Records handed to the emitter were not sorted by event time."""


class IoError(InternalError):
    """Filesystem write failed."""
