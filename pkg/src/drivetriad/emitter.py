"""Deterministic on-disk dataset format: triads.jsonl + manifest.json.

A triad pairs one instruction event with its action segment and (when
video is present) a frame range. Records are serialized by hand rather
than through a generic JSON dumper so that key order, float rendering
(fixed 6 decimals), and line order are byte-stable across runs and
machines — reruns on identical inputs must produce identical bytes.

The manifest records provenance: tool version, content digests of every
input, a digest of the effective configuration, counts, and all warnings
raised along the way.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from ._version import __version__
from .classifier import CommandClass, Evidence, sort_classes
from .core import GeoPoint, format_iso8601_ms
from .errors import InternalError, InternalOrderingError, IoError, ParseError
from .segmenter import ActionSegment, Maneuver
from .sync import InstructionEvent

__all__ = [
    "VisionRef",
    "VlaTriad",
    "Manifest",
    "ManifestInput",
    "make_triads",
    "serialize_triad",
    "export_triads",
    "read_triads",
    "sha256_hex",
    "config_digest",
    "manifest_input",
    "build_manifest",
    "render_manifest",
    "write_manifest",
    "TRIADS_FILENAME",
    "MANIFEST_FILENAME",
]

TRIADS_FILENAME = "triads.jsonl"
MANIFEST_FILENAME = "manifest.json"


@dataclass(frozen=True)
class VisionRef:
    """Frame range (and optional video identity) backing one triad."""

    frame_start: int
    frame_end: int
    video_id: str | None = None

    def __post_init__(self) -> None:
        if self.frame_start > self.frame_end:
            raise InternalError(
                f"frame range inverted: [{self.frame_start}, {self.frame_end}]"
            )


@dataclass(frozen=True)
class VlaTriad:
    """One vision-language-action record."""

    event: InstructionEvent
    action: ActionSegment
    vision: VisionRef | None = None

    def __post_init__(self) -> None:
        if self.action.event_id != self.event.id:
            raise InternalError(
                f"action belongs to event {self.action.event_id}, "
                f"not {self.event.id}"
            )


def make_triads(
    events: Sequence[InstructionEvent],
    segments: Sequence[ActionSegment],
    video_id: str | None = None,
) -> tuple[list[VlaTriad], list[str]]:
    """Pair events with their segments; events without one are dropped
    (each drop is reported in the returned warning list)."""
    by_event = {segment.event_id: segment for segment in segments}
    triads: list[VlaTriad] = []
    warnings: list[str] = []
    for event in events:
        segment = by_event.get(event.id)
        if segment is None:
            warnings.append(
                f"event {event.id} at {format_iso8601_ms(event.t_ms)} has no "
                f"action segment; excluded from triads"
            )
            continue
        vision = None
        if segment.frame_start is not None and segment.frame_end is not None:
            vision = VisionRef(segment.frame_start, segment.frame_end, video_id)
        triads.append(VlaTriad(event, segment, vision))
    return triads, warnings


# --- serialization ----------------------------------------------------------


def _float6(value: float) -> str:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise InternalError(f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise InternalError(f"non-finite number in output: {value!r}")
    rendered = f"{value:.6f}"
    return "0.000000" if rendered == "-0.000000" else rendered


def _opt_float6(value: float | None) -> str:
    return "null" if value is None else _float6(value)


def _opt_int(value: int | None) -> str:
    return "null" if value is None else str(value)


def _string(value: str) -> str:
    return json.dumps(value, ensure_ascii=True)


def _geo_point(point: GeoPoint, with_time: bool) -> str:
    fields = []
    if with_time:
        fields.append(f'"t_ms": {point.t_ms}')
    fields.append(f'"lat": {_float6(point.lat_deg)}')
    fields.append(f'"lon": {_float6(point.lon_deg)}')
    fields.append(f'"ele": {_opt_float6(point.ele_m)}')
    return "{" + ", ".join(fields) + "}"


def serialize_triad(triad: VlaTriad) -> str:
    """One JSON line; fixed key order, 6-decimal floats, ASCII only."""
    event, action = triad.event, triad.action
    classes = ", ".join(_string(c.value) for c in sort_classes(event.classes))
    evidence = ", ".join(
        '{"class": %s, "start": %d, "end": %d, "matched": %s}'
        % (_string(ev.command_class.value), ev.start, ev.end, _string(ev.matched))
        for ev in event.evidence
    )
    waypoints = ", ".join(
        _geo_point(point, with_time=True) for point in action.waypoints
    )
    action_json = (
        '{"t_start_ms": %d, "t_end_ms": %d, "maneuver": %s, '
        '"net_bearing_change_deg": %s, "distance_m": %s, "waypoints": [%s], '
        '"frame_start": %s, "frame_end": %s}'
        % (
            action.t_start_ms,
            action.t_end_ms,
            _string(action.maneuver.value),
            _float6(action.net_bearing_change_deg),
            _float6(action.distance_m),
            waypoints,
            _opt_int(action.frame_start),
            _opt_int(action.frame_end),
        )
    )
    return (
        '{"id": %d, "t_utc_ms": %d, "text": %s, "classes": [%s], '
        '"evidence": [%s], "geo": %s, "heading_deg": %s, "frame_index": %s, '
        '"action": %s}'
        % (
            event.id,
            event.t_ms,
            _string(event.text),
            classes,
            evidence,
            _geo_point(event.geo, with_time=False),
            _opt_float6(event.heading_deg),
            _opt_int(event.frame_index),
            action_json,
        )
    )


def export_triads(triads: Sequence[VlaTriad], out_dir: Path | str) -> Path:
    """Write triads.jsonl (LF lines, UTF-8). Input must be time-ordered."""
    for previous, current in zip(triads, triads[1:]):
        if current.event.t_ms < previous.event.t_ms:
            raise InternalOrderingError(
                f"triads out of time order at events "
                f"{previous.event.id} -> {current.event.id}"
            )
    target = Path(out_dir) / TRIADS_FILENAME
    body = "".join(serialize_triad(t) + "\n" for t in triads)
    try:
        with open(target, "w", encoding="utf-8", newline="") as handle:
            handle.write(body)
    except OSError as exc:
        raise IoError(f"cannot write {target}: {exc}") from exc
    return target


# --- reading back -----------------------------------------------------------


def read_triads(data: bytes, source: str = TRIADS_FILENAME) -> list[VlaTriad]:
    """Parse a triads.jsonl byte stream back into triad objects.

    Schema violations raise ParseError naming the source and line number.
    """
    triads = []
    for line_no, line in enumerate(data.decode("utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            triads.append(_triad_from_json(line))
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise ParseError(f"{source}:{line_no}: {exc}") from exc
    return triads


def _req(obj: dict, key: str) -> object:
    if key not in obj:
        raise KeyError(f"missing field {key!r}")
    return obj[key]


def _geo_from(obj: dict, t_ms: int) -> GeoPoint:
    ele = obj.get("ele")
    return GeoPoint(
        float(_req(obj, "lat")),
        float(_req(obj, "lon")),
        t_ms,
        None if ele is None else float(ele),
    )


def _triad_from_json(line: str) -> VlaTriad:
    obj = json.loads(line)
    if not isinstance(obj, dict):
        raise ValueError("record is not an object")
    event_id = int(_req(obj, "id"))
    t_ms = int(_req(obj, "t_utc_ms"))
    classes = frozenset(
        CommandClass.from_name(name) for name in _req(obj, "classes")
    )
    evidence = tuple(
        Evidence(
            CommandClass.from_name(_req(ev, "class")),
            int(_req(ev, "start")),
            int(_req(ev, "end")),
            str(_req(ev, "matched")),
        )
        for ev in _req(obj, "evidence")
    )
    heading = obj.get("heading_deg")
    frame_index = obj.get("frame_index")
    event = InstructionEvent(
        id=event_id,
        t_ms=t_ms,
        text=str(_req(obj, "text")),
        classes=classes,
        evidence=evidence,
        geo=_geo_from(_req(obj, "geo"), t_ms),
        heading_deg=None if heading is None else float(heading),
        frame_index=None if frame_index is None else int(frame_index),
    )
    raw_action = _req(obj, "action")
    waypoints = tuple(
        _geo_from(wp, int(_req(wp, "t_ms"))) for wp in _req(raw_action, "waypoints")
    )
    try:
        maneuver = Maneuver(str(_req(raw_action, "maneuver")))
    except ValueError:
        raise ValueError(
            f"unknown maneuver {raw_action.get('maneuver')!r}"
        ) from None
    frame_start = raw_action.get("frame_start")
    frame_end = raw_action.get("frame_end")
    action = ActionSegment(
        event_id=event_id,
        t_start_ms=int(_req(raw_action, "t_start_ms")),
        t_end_ms=int(_req(raw_action, "t_end_ms")),
        waypoints=waypoints,
        net_bearing_change_deg=float(_req(raw_action, "net_bearing_change_deg")),
        distance_m=float(_req(raw_action, "distance_m")),
        maneuver=maneuver,
        frame_start=None if frame_start is None else int(frame_start),
        frame_end=None if frame_end is None else int(frame_end),
    )
    vision = None
    if action.frame_start is not None and action.frame_end is not None:
        vision = VisionRef(action.frame_start, action.frame_end, None)
    return VlaTriad(event, action, vision)


# --- manifest ---------------------------------------------------------------


@dataclass(frozen=True)
class ManifestInput:
    """Provenance record for one input file."""

    path: str
    role: str
    sha256: str


@dataclass(frozen=True)
class Manifest:
    """Provenance and accounting for one emitted dataset directory."""

    tool_version: str
    created_at_ms: int
    inputs: tuple[ManifestInput, ...]
    config_sha256: str
    event_count: int
    segment_count: int
    warnings: tuple[str, ...]


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def manifest_input(
    path: str | Path, role: str, data: bytes, relativize: bool = False
) -> ManifestInput:
    """Digest one input; --relativize keeps only the basename so digests
    compare across machines."""
    shown = os.path.basename(str(path)) if relativize else str(path)
    return ManifestInput(shown, role, sha256_hex(data))


def config_digest(config: Mapping[str, object]) -> str:
    """Digest of the effective configuration, canonicalized."""
    canonical = json.dumps(
        config, sort_keys=True, separators=(",", ":"), ensure_ascii=True
    )
    return sha256_hex(canonical.encode("utf-8"))


def build_manifest(
    inputs: Sequence[ManifestInput],
    config_sha256: str,
    event_count: int,
    segment_count: int,
    warnings: Sequence[str],
    created_at_ms: int,
) -> Manifest:
    return Manifest(
        tool_version=__version__,
        created_at_ms=created_at_ms,
        inputs=tuple(inputs),
        config_sha256=config_sha256,
        event_count=event_count,
        segment_count=segment_count,
        warnings=tuple(warnings),
    )


def render_manifest(manifest: Manifest) -> str:
    document = {
        "tool_version": manifest.tool_version,
        "created_at_utc_ms": manifest.created_at_ms,
        "inputs": [
            {"path": i.path, "role": i.role, "sha256": i.sha256}
            for i in manifest.inputs
        ],
        "config_sha256": manifest.config_sha256,
        "event_count": manifest.event_count,
        "segment_count": manifest.segment_count,
        "warnings": list(manifest.warnings),
    }
    return json.dumps(document, indent=2, ensure_ascii=True) + "\n"


def write_manifest(manifest: Manifest, out_dir: Path | str) -> Path:
    target = Path(out_dir) / MANIFEST_FILENAME
    try:
        with open(target, "w", encoding="utf-8", newline="") as handle:
            handle.write(render_manifest(manifest))
    except OSError as exc:
        raise IoError(f"cannot write {target}: {exc}") from exc
    return target
