"""Parsers for the three input streams.

* GPX 1.0/1.1 track logs (the action stream),
* transcript segment files in three formats (the language stream),
* a JSON video sidecar describing start time / fps / frame count
  (the vision stream; media files are never opened here).

Parsers are pure functions of their byte input.
"""

from __future__ import annotations

import json
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass

from .core import GeoPoint, TrackLog, parse_iso8601_ms
from .errors import (
    EmptyTrack,
    EmptyTranscript,
    EncodingError,
    InvalidAnchor,
    InvalidFps,
    MissingTimestamp,
    NonMonotoneTrack,
    ParseError,
)

TRANSCRIPT_FORMATS = ("segment-json", "srt", "plain-lines")


@dataclass(frozen=True)
class TranscriptSegment:
    """One stretch of transcribed speech, in seconds relative to audio start."""

    start_s: float
    end_s: float
    text: str


@dataclass(frozen=True)
class Transcript:
    """Ordered, non-overlapping transcript segments plus an optional anchor."""

    segments: tuple[TranscriptSegment, ...]
    audio_start_ms: int | None = None


@dataclass(frozen=True)
class VideoIndex:
    """Maps wall time to frame indices without touching the media file."""

    start_ms: int
    fps: float
    frame_count: int

    def shifted(self, offset_ms: int) -> "VideoIndex":
        if offset_ms == 0:
            return self
        return VideoIndex(self.start_ms + offset_ms, self.fps, self.frame_count)


def _local_name(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def parse_gpx(data: bytes, source_id: str = "gpx") -> TrackLog:
    """Parse GPX bytes into a TrackLog.

    Collects every trkpt across all trk/trkseg elements in document order.
    Each point must carry lat/lon attributes and a time child; a point
    without time is a hard error rather than a silent gap, because gaps
    corrupt interpolation downstream.
    """
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise ParseError(f"malformed GPX XML: {exc}") from exc

    points: list[GeoPoint] = []
    for elem in root.iter():
        if _local_name(elem.tag) != "trkpt":
            continue
        index = len(points)
        lat_text = elem.get("lat")
        lon_text = elem.get("lon")
        if lat_text is None or lon_text is None:
            raise ParseError(f"trkpt {index}: missing lat/lon attribute")
        ele_m: float | None = None
        t_ms: int | None = None
        for child in elem:
            name = _local_name(child.tag)
            if name == "ele" and child.text is not None:
                try:
                    ele_m = float(child.text)
                except ValueError as exc:
                    raise ParseError(f"trkpt {index}: bad ele {child.text!r}") from exc
            elif name == "time" and child.text is not None:
                t_ms = parse_iso8601_ms(child.text)
        if t_ms is None:
            raise MissingTimestamp(f"trkpt {index} has no time element")
        try:
            point = GeoPoint(float(lat_text), float(lon_text), t_ms, ele_m)
        except ValueError as exc:
            raise ParseError(f"trkpt {index}: {exc}") from exc
        if points and point.t_ms < points[-1].t_ms:
            raise NonMonotoneTrack(
                f"trkpt {index}: time goes backwards "
                f"({points[-1].t_ms} -> {point.t_ms})"
            )
        points.append(point)

    if not points:
        raise EmptyTrack("GPX contains no trkpt elements")
    return TrackLog(tuple(points), source_id)


def _decode(data: bytes) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise EncodingError(f"input is not valid UTF-8: {exc}") from exc


_SRT_TIME = re.compile(
    r"(\d{1,2}):(\d{2}):(\d{2})[,.](\d{1,3})\s*-->\s*(\d{1,2}):(\d{2}):(\d{2})[,.](\d{1,3})"
)


def _srt_seconds(h: str, m: str, s: str, ms: str) -> float:
    return int(h) * 3600 + int(m) * 60 + int(s) + int(ms.ljust(3, "0")) / 1000.0


def _parse_srt(text: str) -> list[TranscriptSegment]:
    segments = []
    blocks = re.split(r"\n\s*\n", text.strip())
    for block_no, block in enumerate(blocks, start=1):
        lines = [line.strip() for line in block.splitlines() if line.strip()]
        if not lines:
            continue
        if lines[0].isdigit():
            lines = lines[1:]
        if not lines:
            raise ParseError(f"srt block {block_no}: no timing line")
        match = _SRT_TIME.fullmatch(lines[0])
        if match is None:
            raise ParseError(f"srt block {block_no}: bad timing line {lines[0]!r}")
        start_s = _srt_seconds(*match.groups()[:4])
        end_s = _srt_seconds(*match.groups()[4:])
        if end_s < start_s:
            raise ParseError(f"srt block {block_no}: end before start")
        body = " ".join(lines[1:]).strip()
        if body:
            segments.append(TranscriptSegment(start_s, end_s, body))
    return segments


def _parse_segment_json(text: str) -> tuple[list[TranscriptSegment], int | None]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad JSON: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("segments"), list):
        raise ParseError('expected an object with a "segments" array')
    anchor_ms = None
    anchor_text = doc.get("audio_start_utc")
    if anchor_text is not None:
        if not isinstance(anchor_text, str):
            raise ParseError("audio_start_utc must be an ISO-8601 string")
        anchor_ms = parse_iso8601_ms(anchor_text)
    segments = []
    for i, raw in enumerate(doc["segments"]):
        if not isinstance(raw, dict):
            raise ParseError(f"segment {i}: not an object")
        start = raw.get("start")
        end = raw.get("end")
        seg_text = raw.get("text")
        if not isinstance(start, (int, float)) or not isinstance(end, (int, float)):
            raise ParseError(f"segment {i}: start/end must be numbers")
        if not isinstance(seg_text, str):
            raise ParseError(f"segment {i}: text must be a string")
        if start < 0 or end < start:
            raise ParseError(f"segment {i}: bad timing [{start}, {end}]")
        body = seg_text.strip()
        if body:
            segments.append(TranscriptSegment(float(start), float(end), body))
    return segments, anchor_ms


def _parse_plain_lines(text: str) -> list[TranscriptSegment]:
    segments = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = line.split("\t", 2)
        if len(parts) != 3:
            raise ParseError(f"line {line_no}: expected start<TAB>end<TAB>text")
        try:
            start_s = float(parts[0])
            end_s = float(parts[1])
        except ValueError as exc:
            raise ParseError(f"line {line_no}: bad timing {parts[:2]!r}") from exc
        if start_s < 0 or end_s < start_s:
            raise ParseError(f"line {line_no}: bad timing [{start_s}, {end_s}]")
        body = parts[2].strip()
        if body:
            segments.append(TranscriptSegment(start_s, end_s, body))
    return segments


def _merge_overlaps(segments: list[TranscriptSegment]) -> tuple[TranscriptSegment, ...]:
    """Sort by start and merge overlapping segments.

    Speech-to-text tools occasionally emit overlaps; merging keeps the event
    timeline simple. Text concatenates with a single space, the merged
    segment keeps the min start and max end. Touching segments stay separate.
    """
    ordered = sorted(segments, key=lambda s: (s.start_s, s.end_s))
    merged: list[TranscriptSegment] = []
    for seg in ordered:
        if merged and seg.start_s < merged[-1].end_s:
            prev = merged[-1]
            merged[-1] = TranscriptSegment(
                prev.start_s, max(prev.end_s, seg.end_s), prev.text + " " + seg.text
            )
        else:
            merged.append(seg)
    return tuple(merged)


def parse_transcript(data: bytes, format: str) -> Transcript:
    """Parse transcript bytes in one of TRANSCRIPT_FORMATS.

    Whatever the source format, the result is sorted by start time with
    overlaps merged, and empty-text segments dropped. An input with no
    usable segments raises EmptyTranscript. Only segment-json may carry
    its own wall-clock anchor ("audio_start_utc").
    """
    text = _decode(data)
    anchor_ms = None
    if format == "segment-json":
        segments, anchor_ms = _parse_segment_json(text)
    elif format == "srt":
        segments = _parse_srt(text)
    elif format == "plain-lines":
        segments = _parse_plain_lines(text)
    else:
        raise ValueError(f"unknown transcript format: {format!r}")
    if not segments:
        raise EmptyTranscript("no usable transcript segments")
    return Transcript(_merge_overlaps(segments), anchor_ms)


def parse_video_meta(data: bytes) -> VideoIndex:
    """Parse the video sidecar: {"start_time": ISO-8601, "fps": n, "frame_count": n}."""
    text = _decode(data)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad JSON sidecar: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("sidecar must be a JSON object")
    for fieldname in ("start_time", "fps", "frame_count"):
        if fieldname not in doc:
            raise ParseError(fieldname)
    if not isinstance(doc["start_time"], str):
        raise ParseError("start_time must be an ISO-8601 string")
    start_ms = parse_iso8601_ms(doc["start_time"])
    fps = doc["fps"]
    if not isinstance(fps, (int, float)) or isinstance(fps, bool):
        raise ParseError("fps must be a number")
    if fps <= 0:
        raise InvalidFps(f"fps must be positive, got {fps}")
    frame_count = doc["frame_count"]
    if not isinstance(frame_count, int) or isinstance(frame_count, bool) or frame_count < 0:
        raise ParseError("frame_count must be a non-negative integer")
    return VideoIndex(start_ms, float(fps), frame_count)


def absolutize(
    transcript: Transcript, audio_start_ms: int, offset_ms: int = 0
) -> list[tuple[int, str]]:
    """Anchor relative segment starts to wall time.

    Each segment maps to (audio_start + round(start_s * 1000) + offset, text)
    in input order. Any result before the epoch raises InvalidAnchor.
    """
    events = []
    for i, seg in enumerate(transcript.segments):
        t_ms = audio_start_ms + round(seg.start_s * 1000) + offset_ms
        if t_ms < 0:
            raise InvalidAnchor(f"segment {i} lands before the epoch: {t_ms} ms")
        events.append((t_ms, seg.text))
    return events
