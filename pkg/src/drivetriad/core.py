"""Core domain types, time arithmetic, and spherical geodesy.

Conventions used throughout the package:

* Timestamps are integer milliseconds since the Unix epoch, UTC. Keeping them
  integral avoids float-equality hazards when streams are compared and makes
  emitted datasets byte-reproducible.
* The Earth is a sphere of mean radius 6 371 008.8 m. Instruction-scale
  distances (meters to a few miles) do not warrant an ellipsoid.
* Bearings are compass degrees in [0, 360): 0 = north, 90 = east, clockwise
  positive.
* Positional interpolation is linear in lat/lon. Track points are seconds
  apart, so the departure from the great circle is negligible at vehicle
  speeds, and linearity makes midpoint tests exact.

All types are immutable values and all operations are pure functions.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone

from .errors import DegenerateBearing, NonMonotoneTrack, OutOfTrackSpan, ParseError

EARTH_RADIUS_M = 6_371_008.8
"""Mean Earth radius in meters (arithmetic mean of the ellipsoid axes)."""

DEFAULT_TOLERANCE_MS = 5000
"""How far outside the track span a query may fall and still be clamped."""

_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


def parse_iso8601_ms(text: str) -> int:
    """Parse an ISO-8601 instant into epoch milliseconds (UTC).

    Accepts a trailing ``Z``, an explicit offset, or a naive value (treated
    as UTC). Raises ParseError on anything unparseable or before the epoch.
    """
    cleaned = text.strip()
    if cleaned.endswith(("Z", "z")):
        cleaned = cleaned[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(cleaned)
    except ValueError as exc:
        raise ParseError(f"bad ISO-8601 timestamp: {text!r}") from exc
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    micros = (dt - _EPOCH) // timedelta(microseconds=1)
    if micros < 0:
        raise ParseError(f"timestamp before the epoch: {text!r}")
    return (micros + 500) // 1000


def format_iso8601_ms(t_ms: int) -> str:
    """Render epoch milliseconds as ``YYYY-MM-DDTHH:MM:SS.mmmZ``."""
    dt = _EPOCH + timedelta(milliseconds=t_ms)
    return dt.strftime("%Y-%m-%dT%H:%M:%S.") + f"{t_ms % 1000:03d}Z"


@dataclass(frozen=True)
class GeoPoint:
    """A timestamped WGS-84 position.

    lat_deg must lie in [-90, 90] and lon_deg in [-180, 180); a longitude of
    exactly 180 is folded to -180. t_ms is epoch milliseconds, non-negative.
    """

    lat_deg: float
    lon_deg: float
    t_ms: int
    ele_m: float | None = None

    def __post_init__(self) -> None:
        if not -90.0 <= self.lat_deg <= 90.0:
            raise ValueError(f"latitude out of range: {self.lat_deg}")
        if self.lon_deg == 180.0:
            object.__setattr__(self, "lon_deg", -180.0)
        if not -180.0 <= self.lon_deg < 180.0:
            raise ValueError(f"longitude out of range: {self.lon_deg}")
        if self.t_ms < 0:
            raise ValueError(f"negative timestamp: {self.t_ms}")


@dataclass(frozen=True)
class TrackLog:
    """Time-ordered GPS fixes from one drive.

    Timestamps must be non-decreasing. A single-point log is a valid parse
    result; interpolation and bearing queries need at least two points.
    """

    points: tuple[GeoPoint, ...]
    source_id: str = ""

    def __post_init__(self) -> None:
        pts = tuple(self.points)
        object.__setattr__(self, "points", pts)
        for prev, nxt in zip(pts, pts[1:]):
            if nxt.t_ms < prev.t_ms:
                raise NonMonotoneTrack(
                    f"timestamps decrease: {prev.t_ms} -> {nxt.t_ms}"
                )

    def __len__(self) -> int:
        return len(self.points)

    @property
    def start_ms(self) -> int:
        return self.points[0].t_ms

    @property
    def end_ms(self) -> int:
        return self.points[-1].t_ms

    def shifted(self, offset_ms: int) -> "TrackLog":
        """A copy with every timestamp moved by offset_ms."""
        if offset_ms == 0:
            return self
        moved = tuple(
            GeoPoint(p.lat_deg, p.lon_deg, p.t_ms + offset_ms, p.ele_m)
            for p in self.points
        )
        return TrackLog(moved, self.source_id)


def normalize_bearing(deg: float) -> float:
    """Fold an angle into the compass range [0, 360)."""
    folded = math.fmod(deg, 360.0)
    if folded < 0.0:
        folded += 360.0
    return 0.0 if folded == 360.0 else folded


def haversine_distance(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance in meters between two points.

    Symmetric and non-negative; uses the haversine form, which stays
    accurate for the short hops between consecutive track fixes.
    """
    lat1 = math.radians(a.lat_deg)
    lat2 = math.radians(b.lat_deg)
    dlat = math.radians(b.lat_deg - a.lat_deg)
    dlon = math.radians(b.lon_deg - a.lon_deg)
    h = (
        math.sin(dlat / 2.0) ** 2
        + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    )
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))


def initial_bearing(a: GeoPoint, b: GeoPoint) -> float:
    """Forward azimuth from a to b, compass degrees in [0, 360).

    Raises DegenerateBearing when the points coincide: a stationary vehicle
    has no direction of travel.
    """
    if a.lat_deg == b.lat_deg and a.lon_deg == b.lon_deg:
        raise DegenerateBearing("coincident points have no bearing")
    lat1 = math.radians(a.lat_deg)
    lat2 = math.radians(b.lat_deg)
    dlon = math.radians(b.lon_deg - a.lon_deg)
    y = math.sin(dlon) * math.cos(lat2)
    x = math.cos(lat1) * math.sin(lat2) - math.sin(lat1) * math.cos(lat2) * math.cos(dlon)
    return normalize_bearing(math.degrees(math.atan2(y, x)))


def signed_bearing_delta(from_deg: float, to_deg: float) -> float:
    """Smallest signed rotation from one bearing to another, in (-180, 180].

    Positive means clockwise (a right turn). An exact half-turn maps to +180
    by convention.
    """
    delta = math.fmod(to_deg - from_deg, 360.0)
    if delta > 180.0:
        delta -= 360.0
    elif delta <= -180.0:
        delta += 360.0
    return delta


def _bracket(log: TrackLog, t_ms: int, tolerance_ms: int) -> tuple[int, int, int]:
    """Locate t within the track, clamping into the span when within tolerance.

    Returns (clamped_t, lo_index, hi_index) where lo/hi bracket clamped_t.
    """
    pts = log.points
    if len(pts) < 2:
        raise OutOfTrackSpan("track has fewer than 2 points")
    first, last = pts[0].t_ms, pts[-1].t_ms
    if t_ms < first:
        if first - t_ms > tolerance_ms:
            raise OutOfTrackSpan(
                f"t={t_ms} precedes track start {first} by more than {tolerance_ms} ms"
            )
        return first, 0, 1
    if t_ms > last:
        if t_ms - last > tolerance_ms:
            raise OutOfTrackSpan(
                f"t={t_ms} follows track end {last} by more than {tolerance_ms} ms"
            )
        return last, len(pts) - 2, len(pts) - 1
    times = [p.t_ms for p in pts]
    i = bisect_left(times, t_ms)
    if times[i] == t_ms:
        lo = i if i < len(pts) - 1 else i - 1
        return t_ms, lo, lo + 1
    return t_ms, i - 1, i


def interpolate_position(
    log: TrackLog, t_ms: int, tolerance_ms: int = DEFAULT_TOLERANCE_MS
) -> GeoPoint:
    """Linearly interpolated position at time t.

    Queries up to tolerance_ms outside the span clamp to the nearest
    endpoint; further out raises OutOfTrackSpan. The returned point carries
    the query time, so callers can anchor events at the instant they asked
    about. A query at a track point's own timestamp reproduces that point
    exactly. Elevation interpolates only when both bracketing points have it.
    """
    clamped, lo, hi = _bracket(log, t_ms, tolerance_ms)
    a, b = log.points[lo], log.points[hi]
    if clamped == a.t_ms:
        return GeoPoint(a.lat_deg, a.lon_deg, t_ms, a.ele_m)
    if clamped == b.t_ms:
        return GeoPoint(b.lat_deg, b.lon_deg, t_ms, b.ele_m)
    frac = (clamped - a.t_ms) / (b.t_ms - a.t_ms)
    lat = a.lat_deg + frac * (b.lat_deg - a.lat_deg)
    lon = a.lon_deg + frac * (b.lon_deg - a.lon_deg)
    ele = None
    if a.ele_m is not None and b.ele_m is not None:
        ele = a.ele_m + frac * (b.ele_m - a.ele_m)
    return GeoPoint(lat, lon, t_ms, ele)


def heading_at(
    log: TrackLog, t_ms: int, tolerance_ms: int = DEFAULT_TOLERANCE_MS
) -> float:
    """Direction of travel at time t, from the bracketing track points.

    If the bracketing pair is coincident (vehicle stopped), the window grows
    outward to the nearest pair with actual separation. A log whose points
    all coincide raises DegenerateBearing.
    """
    _, lo, hi = _bracket(log, t_ms, tolerance_ms)
    pts = log.points
    while True:
        a, b = pts[lo], pts[hi]
        if a.lat_deg != b.lat_deg or a.lon_deg != b.lon_deg:
            return initial_bearing(a, b)
        if hi < len(pts) - 1:
            hi += 1
        elif lo > 0:
            lo -= 1
        else:
            raise DegenerateBearing("all track points coincide")


__all__ = [
    "EARTH_RADIUS_M",
    "DEFAULT_TOLERANCE_MS",
    "GeoPoint",
    "TrackLog",
    "parse_iso8601_ms",
    "format_iso8601_ms",
    "normalize_bearing",
    "haversine_distance",
    "initial_bearing",
    "signed_bearing_delta",
    "interpolate_position",
    "heading_at",
]
