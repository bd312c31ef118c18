"""Shared builders and independent oracles used across the test modules."""

from __future__ import annotations

import math

from drivetriad import GeoPoint, TrackLog

EARTH_RADIUS_M = 6_371_008.8


def track_from(coords, start_ms=0, step_ms=1000, source_id="test"):
    """Build a TrackLog from (lat, lon) pairs spaced step_ms apart."""
    points = tuple(
        GeoPoint(lat, lon, start_ms + i * step_ms)
        for i, (lat, lon) in enumerate(coords)
    )
    return TrackLog(points, source_id=source_id)


def straight_north_track(n=10, start_ms=0, step_ms=1000, step_deg=0.0001):
    """n points heading due north from the origin."""
    return track_from(
        [(i * step_deg, 0.0) for i in range(n)], start_ms=start_ms, step_ms=step_ms
    )


# --- independent geodesy oracle --------------------------------------------
#
# Deliberately a different formulation from the library: positions become 3-D
# unit vectors; distance is the angle via atan2(|a x b|, a . b); bearing is
# the great-circle direction at `a` decomposed into local east/north axes.


def _unit_vector(lat_deg: float, lon_deg: float) -> tuple[float, float, float]:
    lat = math.radians(lat_deg)
    lon = math.radians(lon_deg)
    return (
        math.cos(lat) * math.cos(lon),
        math.cos(lat) * math.sin(lon),
        math.sin(lat),
    )


def _cross(a, b):
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def oracle_distance(lat1, lon1, lat2, lon2) -> float:
    a = _unit_vector(lat1, lon1)
    b = _unit_vector(lat2, lon2)
    cross = _cross(a, b)
    angle = math.atan2(math.sqrt(_dot(cross, cross)), _dot(a, b))
    return angle * EARTH_RADIUS_M


def oracle_bearing(lat1, lon1, lat2, lon2) -> float:
    a = _unit_vector(lat1, lon1)
    b = _unit_vector(lat2, lon2)
    lat = math.radians(lat1)
    lon = math.radians(lon1)
    east = (-math.sin(lon), math.cos(lon), 0.0)
    north = (
        -math.sin(lat) * math.cos(lon),
        -math.sin(lat) * math.sin(lon),
        math.cos(lat),
    )
    # component of b orthogonal to a = the departure direction at a
    scale = _dot(a, b)
    departure = (b[0] - scale * a[0], b[1] - scale * a[1], b[2] - scale * a[2])
    bearing = math.degrees(math.atan2(_dot(departure, east), _dot(departure, north)))
    return bearing % 360.0


def circular_diff_deg(a: float, b: float) -> float:
    """Absolute angular difference on the compass circle, in [0, 180]."""
    d = abs(a - b) % 360.0
    return 360.0 - d if d > 180.0 else d
