"""Derivation of action windows: what the vehicle did after each instruction.

Every instruction event opens a window that runs to the next event (the
last one runs to the end of the track). The track slice inside that window
— interpolated boundary points plus the raw points strictly between them —
is summarized as a maneuver: the net signed bearing change over the slice,
bucketed into Straight / LeftTurn / RightTurn / UTurn.

A consistency check compares the stated turn direction in the instruction
text against the observed maneuver and reports contradictions. Reports
only; labels are never auto-corrected, because a disagreement is exactly
the data-quality signal worth surfacing.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .classifier import CommandClass
from .core import (
    DEFAULT_TOLERANCE_MS,
    GeoPoint,
    TrackLog,
    haversine_distance,
    initial_bearing,
    interpolate_position,
    signed_bearing_delta,
)
from .errors import (
    AfterVideoEnd,
    BeforeVideoStart,
    DegenerateBearing,
    InsufficientGeometry,
    InternalOrderingError,
    NoUsableEvents,
)
from .ingest import VideoIndex
from .sync import InstructionEvent, StreamOffsets, frame_index_at

__all__ = [
    "Maneuver",
    "ActionSegment",
    "Mismatch",
    "net_bearing_change",
    "classify_maneuver",
    "segment_actions",
    "consistency_check",
    "collect_mismatches",
    "DEFAULT_JITTER_FLOOR_M",
    "DEFAULT_STRAIGHT_THRESHOLD_DEG",
    "DEFAULT_UTURN_THRESHOLD_DEG",
]

DEFAULT_JITTER_FLOOR_M = 1.0
DEFAULT_STRAIGHT_THRESHOLD_DEG = 30.0
DEFAULT_UTURN_THRESHOLD_DEG = 150.0


class Maneuver(enum.Enum):
    """Coarse motion label derived from net bearing change."""

    STRAIGHT = "Straight"
    LEFT_TURN = "LeftTurn"
    RIGHT_TURN = "RightTurn"
    UTURN = "UTurn"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class ActionSegment:
    """The trajectory window owned by one instruction event.

    ``net_bearing_change_deg`` is 0.0 when the maneuver is Unknown (too
    little usable motion to measure anything).
    """

    event_id: int
    t_start_ms: int
    t_end_ms: int
    waypoints: tuple[GeoPoint, ...]
    net_bearing_change_deg: float
    distance_m: float
    maneuver: Maneuver
    frame_start: int | None
    frame_end: int | None


@dataclass(frozen=True)
class Mismatch:
    """A stated turn direction contradicted by the observed maneuver."""

    event_id: int
    stated: str
    observed: str


def net_bearing_change(
    waypoints: Sequence[GeoPoint],
    jitter_floor_m: float = DEFAULT_JITTER_FLOOR_M,
) -> float:
    """Sum of signed heading deltas along the polyline, in degrees.

    Steps shorter than the jitter floor are folded into their successor so
    GPS noise while stopped does not masquerade as motion. Positive means
    net clockwise (a right turn). Raises InsufficientGeometry when fewer
    than three points survive the floor.
    """
    points = list(waypoints)
    if not points:
        raise InsufficientGeometry("no waypoints")
    kept = [points[0]]
    for point in points[1:]:
        if haversine_distance(kept[-1], point) >= jitter_floor_m:
            kept.append(point)
    if len(kept) < 3:
        raise InsufficientGeometry(
            f"only {len(kept)} waypoint(s) span more than the jitter floor "
            f"({jitter_floor_m} m); need 3"
        )
    bearings = [initial_bearing(kept[i], kept[i + 1]) for i in range(len(kept) - 1)]
    return sum(
        signed_bearing_delta(bearings[i], bearings[i + 1])
        for i in range(len(bearings) - 1)
    )


def classify_maneuver(
    net_change_deg: float,
    straight_threshold_deg: float = DEFAULT_STRAIGHT_THRESHOLD_DEG,
    uturn_threshold_deg: float = DEFAULT_UTURN_THRESHOLD_DEG,
) -> Maneuver:
    """Bucket a net bearing change into a maneuver label."""
    magnitude = abs(net_change_deg)
    if magnitude >= uturn_threshold_deg:
        return Maneuver.UTURN
    if magnitude < straight_threshold_deg:
        return Maneuver.STRAIGHT
    return Maneuver.RIGHT_TURN if net_change_deg > 0 else Maneuver.LEFT_TURN


def segment_actions(
    events: Sequence[InstructionEvent],
    track: TrackLog,
    video: VideoIndex | None = None,
    offsets: StreamOffsets = StreamOffsets(),
    tolerance_ms: int = DEFAULT_TOLERANCE_MS,
    jitter_floor_m: float = DEFAULT_JITTER_FLOOR_M,
    straight_threshold_deg: float = DEFAULT_STRAIGHT_THRESHOLD_DEG,
    uturn_threshold_deg: float = DEFAULT_UTURN_THRESHOLD_DEG,
) -> tuple[list[ActionSegment], list[str]]:
    """Build one action segment per event window, plus warnings.

    Windows are clamped to the track's time span; a window that collapses
    to nothing after clamping produces a warning instead of a segment, so
    consecutive surviving segments still abut exactly.
    """
    if not events:
        raise NoUsableEvents("no instruction events to segment")
    for previous, current in zip(events, events[1:]):
        if current.t_ms < previous.t_ms:
            raise InternalOrderingError(
                f"events {previous.id} and {current.id} are out of time order"
            )
    shifted_track = track.shifted(offsets.gps_ms)
    shifted_video = video.shifted(offsets.video_ms) if video is not None else None

    segments: list[ActionSegment] = []
    warnings: list[str] = []
    for i, event in enumerate(events):
        raw_start = event.t_ms
        raw_end = events[i + 1].t_ms if i + 1 < len(events) else shifted_track.end_ms
        t_start = min(max(raw_start, shifted_track.start_ms), shifted_track.end_ms)
        t_end = min(max(raw_end, shifted_track.start_ms), shifted_track.end_ms)
        if t_start >= t_end:
            warnings.append(
                f"event {event.id}: action window is empty after clamping to "
                f"the track span; no segment emitted"
            )
            continue
        start_point = interpolate_position(shifted_track, t_start, tolerance_ms)
        end_point = interpolate_position(shifted_track, t_end, tolerance_ms)
        interior = [
            p for p in shifted_track.points if t_start < p.t_ms < t_end
        ]
        waypoints = (start_point, *interior, end_point)
        distance = sum(
            haversine_distance(waypoints[j], waypoints[j + 1])
            for j in range(len(waypoints) - 1)
        )
        try:
            net_change = net_bearing_change(waypoints, jitter_floor_m)
            maneuver = classify_maneuver(
                net_change, straight_threshold_deg, uturn_threshold_deg
            )
        except (InsufficientGeometry, DegenerateBearing):
            net_change = 0.0
            maneuver = Maneuver.UNKNOWN
            warnings.append(
                f"event {event.id}: too little usable motion in the window "
                f"to classify a maneuver"
            )
        frame_start = frame_end = None
        if shifted_video is not None:
            try:
                frame_start = frame_index_at(shifted_video, t_start, clamp=True)
                frame_end = frame_index_at(shifted_video, t_end, clamp=True)
            except (BeforeVideoStart, AfterVideoEnd):
                frame_start = frame_end = None
        segments.append(
            ActionSegment(
                event_id=event.id,
                t_start_ms=t_start,
                t_end_ms=t_end,
                waypoints=waypoints,
                net_bearing_change_deg=net_change,
                distance_m=distance,
                maneuver=maneuver,
                frame_start=frame_start,
                frame_end=frame_end,
            )
        )
    return segments, warnings


_SIDE_WORDS = frozenset({"left", "right"})
_WORD_RE = re.compile(r"[a-z-]+")

_OBSERVED_SIDE = {
    Maneuver.LEFT_TURN: "left",
    Maneuver.RIGHT_TURN: "right",
}


def consistency_check(
    event: InstructionEvent, segment: ActionSegment
) -> Mismatch | None:
    """Flag events whose stated turn direction opposes the driven one.

    Only fires when the text states exactly one side (left or right) and
    the observed maneuver is the opposite turn. Straight, UTurn, Unknown,
    and ambiguous texts never mismatch.
    """
    stated_sides = set()
    for evidence in event.evidence:
        if evidence.command_class is not CommandClass.TURN:
            continue
        for word in _WORD_RE.findall(evidence.matched.lower()):
            if word in _SIDE_WORDS:
                stated_sides.add(word)
    if len(stated_sides) != 1:
        return None
    stated = next(iter(stated_sides))
    observed = _OBSERVED_SIDE.get(segment.maneuver)
    if observed is None or observed == stated:
        return None
    return Mismatch(event_id=event.id, stated=stated, observed=observed)


def collect_mismatches(
    events: Iterable[InstructionEvent], segments: Iterable[ActionSegment]
) -> list[Mismatch]:
    """Run the consistency check over every event/segment pair."""
    by_id = {event.id: event for event in events}
    found = []
    for segment in segments:
        event = by_id.get(segment.event_id)
        if event is None:
            continue
        mismatch = consistency_check(event, segment)
        if mismatch is not None:
            found.append(mismatch)
    return found
