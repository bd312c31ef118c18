"""Alignment of transcript, track, and video streams onto one UTC timeline.

Each spoken instruction becomes an InstructionEvent anchored at the
segment's onset time, carrying the interpolated position, heading, and
video frame index at that instant. Per-stream clock offsets are applied
here so raw capture files never need rewriting.

Events that cannot be placed (outside the track's time span beyond the
interpolation tolerance, or with unusable text) are dropped, but every
drop is reported in the returned warning list — nothing disappears
silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .classifier import CommandClass, Evidence, Lexicon, classify
from .core import (
    DEFAULT_TOLERANCE_MS,
    GeoPoint,
    TrackLog,
    format_iso8601_ms,
    heading_at,
    interpolate_position,
)
from .errors import (
    AfterVideoEnd,
    BeforeVideoStart,
    DegenerateBearing,
    EmptyInstruction,
    InvalidAnchor,
    NoUsableEvents,
    OutOfTrackSpan,
)
from .ingest import Transcript, VideoIndex, absolutize

__all__ = [
    "StreamOffsets",
    "InstructionEvent",
    "frame_index_at",
    "build_events",
]


@dataclass(frozen=True)
class StreamOffsets:
    """Signed millisecond corrections added to each stream's timestamps."""

    gps_ms: int = 0
    audio_ms: int = 0
    video_ms: int = 0


@dataclass(frozen=True)
class InstructionEvent:
    """One spoken instruction pinned to time, place, heading, and frame."""

    id: int
    t_ms: int
    text: str
    classes: frozenset[CommandClass]
    evidence: tuple[Evidence, ...]
    geo: GeoPoint
    heading_deg: float | None
    frame_index: int | None
    warnings: tuple[str, ...] = ()


def frame_index_at(video: VideoIndex, t_ms: int, clamp: bool = False) -> int:
    """Map a UTC instant to a frame number: floor((t - start) / 1000 * fps).

    Out-of-range instants raise BeforeVideoStart / AfterVideoEnd unless
    ``clamp`` is set, in which case the nearest valid frame is returned.
    A zero-frame video has no valid frame, so it always raises.
    """
    if video.frame_count == 0:
        raise AfterVideoEnd(
            f"video has no frames (query at {format_iso8601_ms(t_ms)})"
        )
    if t_ms < video.start_ms:
        if clamp:
            return 0
        raise BeforeVideoStart(
            f"instant {format_iso8601_ms(t_ms)} precedes video start "
            f"{format_iso8601_ms(video.start_ms)}"
        )
    # Multiply before dividing: (dt * fps) is exact for integral fps, so
    # whole-second boundaries never land a float ulp below the frame line.
    index = math.floor((t_ms - video.start_ms) * video.fps / 1000.0)
    if index >= video.frame_count:
        if clamp:
            return video.frame_count - 1
        raise AfterVideoEnd(
            f"instant {format_iso8601_ms(t_ms)} maps to frame {index}, "
            f"past the last frame {video.frame_count - 1}"
        )
    return index


def build_events(
    transcript: Transcript,
    track: TrackLog,
    video: VideoIndex | None = None,
    lex: Lexicon | None = None,
    offsets: StreamOffsets = StreamOffsets(),
    audio_start_ms: int | None = None,
    tolerance_ms: int = DEFAULT_TOLERANCE_MS,
) -> tuple[list[InstructionEvent], list[str]]:
    """Classify and place every transcript segment on the shared timeline.

    ``audio_start_ms`` anchors relative transcript times; if omitted, the
    transcript's own embedded anchor is used. Returns the events sorted by
    time with ids 0..n-1, plus corpus-level warnings for dropped segments.
    Raises NoUsableEvents when nothing survives.
    """
    anchor = audio_start_ms if audio_start_ms is not None else transcript.audio_start_ms
    if anchor is None:
        raise InvalidAnchor(
            "transcript has relative times but no audio start anchor was given"
        )
    shifted_track = track.shifted(offsets.gps_ms)
    shifted_video = video.shifted(offsets.video_ms) if video is not None else None

    timed = absolutize(transcript, anchor, offsets.audio_ms)
    warnings: list[str] = []
    placed: list[InstructionEvent] = []
    for t_ms, text in timed:
        try:
            labeled = classify(text, lex)
        except EmptyInstruction:
            warnings.append(
                f"segment at {format_iso8601_ms(t_ms)} has no classifiable "
                f"text ({text!r}); dropped"
            )
            continue
        try:
            geo = interpolate_position(shifted_track, t_ms, tolerance_ms)
        except OutOfTrackSpan:
            warnings.append(
                f"segment at {format_iso8601_ms(t_ms)} is outside the track "
                f"span (tolerance {tolerance_ms} ms); dropped"
            )
            continue
        event_warnings: list[str] = []
        try:
            heading = heading_at(shifted_track, t_ms, tolerance_ms)
        except DegenerateBearing:
            heading = None
            event_warnings.append("heading undefined: track is degenerate here")
        frame: int | None = None
        if shifted_video is not None:
            try:
                frame = frame_index_at(shifted_video, t_ms)
            except (BeforeVideoStart, AfterVideoEnd) as exc:
                frame = None
                event_warnings.append(f"no video frame: {exc}")
        placed.append(
            InstructionEvent(
                id=-1,
                t_ms=t_ms,
                text=text,
                classes=labeled.classes,
                evidence=labeled.evidence,
                geo=geo,
                heading_deg=heading,
                frame_index=frame,
                warnings=tuple(event_warnings),
            )
        )
    if not placed:
        raise NoUsableEvents(
            "no transcript segment could be placed on the track timeline"
        )
    placed.sort(key=lambda e: e.t_ms)
    events = [
        InstructionEvent(
            id=i,
            t_ms=e.t_ms,
            text=e.text,
            classes=e.classes,
            evidence=e.evidence,
            geo=e.geo,
            heading_deg=e.heading_deg,
            frame_index=e.frame_index,
            warnings=e.warnings,
        )
        for i, e in enumerate(placed)
    ]
    return events, warnings
