"""The full batch flow: raw capture files in, dataset directory out.

One call runs ingest → classify → synchronize → segment → stats → emit
and writes four artifacts into the output directory:

* triads.jsonl    — the vision-language-action records
* manifest.json   — provenance (input digests, config digest, warnings)
* report.txt      — class and combination frequency tables
* mismatches.txt  — stated-vs-observed turn direction contradictions

Everything is computed before anything is written, so a hard error never
leaves a partial triads file behind. Warnings never abort; they are
collected into the manifest.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path

from .classifier import load_lexicon
from .core import DEFAULT_TOLERANCE_MS, parse_iso8601_ms
from .emitter import (
    build_manifest,
    config_digest,
    export_triads,
    make_triads,
    manifest_input,
    write_manifest,
)
from .errors import IoError
from .ingest import parse_gpx, parse_transcript, parse_video_meta
from .segmenter import (
    DEFAULT_JITTER_FLOOR_M,
    DEFAULT_STRAIGHT_THRESHOLD_DEG,
    DEFAULT_UTURN_THRESHOLD_DEG,
    collect_mismatches,
    segment_actions,
)
from .stats import corpus_stats, render_report
from .sync import StreamOffsets, build_events

__all__ = ["PipelineConfig", "PipelineResult", "run_pipeline"]

REPORT_FILENAME = "report.txt"
MISMATCHES_FILENAME = "mismatches.txt"


@dataclass(frozen=True)
class PipelineConfig:
    """Everything one pipeline run needs; paths stay untouched on disk."""

    gpx_path: Path
    transcript_path: Path
    out_dir: Path
    transcript_format: str = "segment-json"
    video_meta_path: Path | None = None
    audio_start: str | None = None
    gps_offset_ms: int = 0
    audio_offset_ms: int = 0
    video_offset_ms: int = 0
    lexicon_path: Path | None = None
    tolerance_ms: int = DEFAULT_TOLERANCE_MS
    jitter_floor_m: float = DEFAULT_JITTER_FLOOR_M
    straight_threshold_deg: float = DEFAULT_STRAIGHT_THRESHOLD_DEG
    uturn_threshold_deg: float = DEFAULT_UTURN_THRESHOLD_DEG
    source_label: str | None = None
    relativize: bool = False


@dataclass(frozen=True)
class PipelineResult:
    """What a run produced, for summaries and tests."""

    out_dir: Path
    event_count: int
    segment_count: int
    warning_count: int
    mismatch_count: int
    triads_path: Path
    manifest_path: Path
    report_path: Path
    mismatches_path: Path


def _effective_config(config: PipelineConfig, lexicon_version: str) -> dict:
    """The behavior knobs that go into the manifest's config digest.

    Input file content is covered by the per-input digests, so paths are
    deliberately excluded here.
    """
    return {
        "transcript_format": config.transcript_format,
        "audio_start": config.audio_start,
        "gps_offset_ms": config.gps_offset_ms,
        "audio_offset_ms": config.audio_offset_ms,
        "video_offset_ms": config.video_offset_ms,
        "tolerance_ms": config.tolerance_ms,
        "jitter_floor_m": config.jitter_floor_m,
        "straight_threshold_deg": config.straight_threshold_deg,
        "uturn_threshold_deg": config.uturn_threshold_deg,
        "lexicon_version": lexicon_version,
        "source_label": config.source_label,
        "relativize": config.relativize,
    }


def run_pipeline(
    config: PipelineConfig, created_at_ms: int | None = None
) -> PipelineResult:
    """Run the whole flow and write the four artifacts.

    ``created_at_ms`` pins the manifest timestamp (tests use this); by
    default the current wall clock is recorded. All other output bytes
    are pure functions of the inputs and config.
    """
    gpx_bytes = Path(config.gpx_path).read_bytes()
    transcript_bytes = Path(config.transcript_path).read_bytes()
    video_bytes = (
        Path(config.video_meta_path).read_bytes()
        if config.video_meta_path is not None
        else None
    )
    lexicon_bytes = (
        Path(config.lexicon_path).read_bytes()
        if config.lexicon_path is not None
        else None
    )

    lexicon = load_lexicon(lexicon_bytes)
    track = parse_gpx(gpx_bytes, source_id=Path(config.gpx_path).stem)
    transcript = parse_transcript(transcript_bytes, config.transcript_format)
    video = parse_video_meta(video_bytes) if video_bytes is not None else None
    audio_start_ms = (
        parse_iso8601_ms(config.audio_start)
        if config.audio_start is not None
        else None
    )
    offsets = StreamOffsets(
        gps_ms=config.gps_offset_ms,
        audio_ms=config.audio_offset_ms,
        video_ms=config.video_offset_ms,
    )

    events, warnings = build_events(
        transcript,
        track,
        video,
        lexicon,
        offsets,
        audio_start_ms,
        config.tolerance_ms,
    )
    segments, segment_warnings = segment_actions(
        events,
        track,
        video,
        offsets,
        config.tolerance_ms,
        config.jitter_floor_m,
        config.straight_threshold_deg,
        config.uturn_threshold_deg,
    )
    warnings += [
        f"event {event.id}: {note}" for event in events for note in event.warnings
    ]
    warnings += segment_warnings
    mismatches = collect_mismatches(events, segments)

    video_id = (
        Path(config.video_meta_path).stem
        if config.video_meta_path is not None
        else None
    )
    triads, triad_warnings = make_triads(events, segments, video_id)
    warnings += triad_warnings

    label = config.source_label or Path(config.gpx_path).stem
    report = render_report([corpus_stats(label, events)])
    mismatch_lines = "".join(
        f"event {m.event_id}: stated {m.stated}, observed {m.observed}\n"
        for m in mismatches
    )

    inputs = [
        manifest_input(config.gpx_path, "track", gpx_bytes, config.relativize),
        manifest_input(
            config.transcript_path, "transcript", transcript_bytes, config.relativize
        ),
    ]
    if video_bytes is not None:
        inputs.append(
            manifest_input(
                config.video_meta_path, "video-meta", video_bytes, config.relativize
            )
        )
    if lexicon_bytes is not None:
        inputs.append(
            manifest_input(
                config.lexicon_path, "lexicon", lexicon_bytes, config.relativize
            )
        )
    manifest = build_manifest(
        inputs=inputs,
        config_sha256=config_digest(_effective_config(config, lexicon.version)),
        event_count=len(events),
        segment_count=len(segments),
        warnings=warnings,
        created_at_ms=(
            created_at_ms if created_at_ms is not None else int(time.time() * 1000)
        ),
    )

    out_dir = Path(config.out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create output directory {out_dir}: {exc}") from exc
    triads_path = export_triads(triads, out_dir)
    manifest_path = write_manifest(manifest, out_dir)
    report_path = out_dir / REPORT_FILENAME
    mismatches_path = out_dir / MISMATCHES_FILENAME
    try:
        report_path.write_text(report, encoding="utf-8", newline="")
        mismatches_path.write_text(mismatch_lines, encoding="utf-8", newline="")
    except OSError as exc:
        raise IoError(f"cannot write report files: {exc}") from exc

    return PipelineResult(
        out_dir=out_dir,
        event_count=len(events),
        segment_count=len(segments),
        warning_count=len(warnings),
        mismatch_count=len(mismatches),
        triads_path=triads_path,
        manifest_path=manifest_path,
        report_path=report_path,
        mismatches_path=mismatches_path,
    )
