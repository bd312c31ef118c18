"""Command-line front end.

Four subcommands mirror the pipeline stages so each is testable alone:

* classify — label a transcript, one JSON record per segment on stdout
* pipeline — full run: capture files in, dataset directory out
* stats    — merge triads files into frequency tables
* synth    — generate a synthetic corpus with known ground truth

Every option can also come from a JSON config file (--config); values
given as flags win over file values. Exit codes: 0 success, 64 usage,
65 bad data, 66 missing input, 70 internal error. All work is on local
files; nothing ever touches the network.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Callable

from ._version import __version__
from .classifier import classify, load_lexicon, sort_classes
from .errors import DataError, InternalError, ParseError
from .emitter import read_triads
from .ingest import TRANSCRIPT_FORMATS, parse_transcript
from .pipeline import PipelineConfig, run_pipeline
from .stats import corpus_stats, render_report
from .synth import (
    RoutePlan,
    STYLES,
    generate_instructions,
    parse_legs,
    write_corpus,
)

__all__ = ["main", "entry"]

EXIT_OK = 0
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_NOINPUT = 66
EXIT_INTERNAL = 70

_DEFAULT_LEGS = "600R,500L,700R,400"


class _Parser(argparse.ArgumentParser):
    """argparse's usage failures exit 2; this project promises 64."""

    def error(self, message: str) -> None:  # noqa: D401 - argparse hook
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


class _Options:
    """Merged view over parsed flags and the optional config file."""

    def __init__(self, args: argparse.Namespace, parser: _Parser) -> None:
        self._args = args
        self._parser = parser
        self._file: dict = {}
        config_path = getattr(args, "config", None)
        if config_path is not None:
            raw = Path(config_path).read_bytes()
            try:
                doc = json.loads(raw.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                raise ParseError(f"{config_path}: not valid JSON: {exc}") from exc
            if not isinstance(doc, dict):
                raise ParseError(f"{config_path}: config must be a JSON object")
            self._file = {
                str(key).replace("-", "_"): value for key, value in doc.items()
            }

    def get(self, name: str, default=None):
        flag_value = getattr(self._args, name, None)
        if flag_value is not None:
            return flag_value
        if name in self._file and self._file[name] is not None:
            return self._file[name]
        return default

    def require(self, name: str, flag: str):
        value = self.get(name)
        if value is None:
            self._parser.error(f"{flag} is required (flag or config file)")
        return value

    def choice(self, name: str, flag: str, allowed, default):
        value = self.get(name, default)
        if value not in allowed:
            self._parser.error(
                f"{flag}: invalid value {value!r} (choose from "
                f"{', '.join(allowed)})"
            )
        return value


def _add_config_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--config",
        metavar="JSON",
        help="JSON file supplying any of this subcommand's options; "
        "flags override it",
    )


def _add_transcript_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--transcript", metavar="PATH", help="transcript file")
    parser.add_argument(
        "--transcript-format",
        choices=TRANSCRIPT_FORMATS,
        help="transcript syntax (default: segment-json)",
    )
    parser.add_argument(
        "--lexicon", metavar="PATH", help="JSON lexicon override file"
    )


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="drivetriad",
        description="Turn drive recordings (GPS track, navigation-voice "
        "transcript, video metadata) into synchronized, auto-annotated "
        "vision-language-action records.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")

    p_classify = commands.add_parser(
        "classify", help="label each transcript segment (JSON lines on stdout)"
    )
    _add_transcript_flags(p_classify)
    _add_config_flag(p_classify)
    p_classify.set_defaults(func=_run_classify)

    p_pipeline = commands.add_parser(
        "pipeline", help="full run: write triads.jsonl + manifest + reports"
    )
    p_pipeline.add_argument("--gpx", metavar="PATH", help="GPX track log")
    _add_transcript_flags(p_pipeline)
    p_pipeline.add_argument(
        "--audio-start",
        metavar="ISO8601",
        help="wall-clock anchor for relative transcript times",
    )
    p_pipeline.add_argument(
        "--video-meta", metavar="PATH", help="video sidecar JSON"
    )
    p_pipeline.add_argument("--gps-offset-ms", type=int, metavar="MS")
    p_pipeline.add_argument("--audio-offset-ms", type=int, metavar="MS")
    p_pipeline.add_argument("--video-offset-ms", type=int, metavar="MS")
    p_pipeline.add_argument(
        "--tolerance-ms",
        type=int,
        metavar="MS",
        help="max clock gap bridged when placing events (default 5000)",
    )
    p_pipeline.add_argument("--out", metavar="DIR", help="output directory")
    p_pipeline.add_argument(
        "--source-label", metavar="NAME", help="column label in report.txt"
    )
    p_pipeline.add_argument(
        "--relativize",
        action="store_const",
        const=True,
        help="record only basenames in the manifest",
    )
    _add_config_flag(p_pipeline)
    p_pipeline.set_defaults(func=_run_pipeline)

    p_stats = commands.add_parser(
        "stats", help="frequency tables over one or more triads.jsonl files"
    )
    p_stats.add_argument(
        "sources",
        nargs="+",
        metavar="LABEL=PATH",
        help="triads.jsonl per source; bare PATH uses the file stem as label",
    )
    p_stats.add_argument("--out", metavar="PATH", help="write report here "
                         "instead of stdout")
    _add_config_flag(p_stats)
    p_stats.set_defaults(func=_run_stats)

    p_synth = commands.add_parser(
        "synth", help="generate a synthetic corpus with ground truth"
    )
    p_synth.add_argument("--seed", type=int, metavar="N")
    p_synth.add_argument(
        "--legs",
        metavar="SPEC",
        help=f'route legs like "400R,300L,250" (default {_DEFAULT_LEGS})',
    )
    p_synth.add_argument("--style", choices=STYLES, help="instruction style")
    p_synth.add_argument("--noise-sigma-m", type=float, metavar="M")
    p_synth.add_argument("--speed-mps", type=float, metavar="M_PER_S")
    p_synth.add_argument("--sample-hz", type=float, metavar="HZ")
    p_synth.add_argument("--out", metavar="DIR", help="output directory")
    _add_config_flag(p_synth)
    p_synth.set_defaults(func=_run_synth)

    return parser


def _run_classify(args: argparse.Namespace, parser: _Parser) -> int:
    options = _Options(args, parser)
    transcript_path = options.require("transcript", "--transcript")
    fmt = options.choice(
        "transcript_format", "--transcript-format", TRANSCRIPT_FORMATS,
        "segment-json",
    )
    lexicon_path = options.get("lexicon")
    lexicon = load_lexicon(
        Path(lexicon_path).read_bytes() if lexicon_path else None
    )
    data = Path(transcript_path).read_bytes()
    try:
        transcript = parse_transcript(data, fmt)
    except DataError as exc:
        raise type(exc)(f"{transcript_path}: {exc}") from exc
    for segment in transcript.segments:
        result = classify(segment.text, lexicon)
        record = {
            "text": result.text,
            "classes": [cls.value for cls in sort_classes(result.classes)],
            "evidence": [
                {
                    "class": ev.command_class.value,
                    "start": ev.start,
                    "end": ev.end,
                    "matched": ev.matched,
                }
                for ev in result.evidence
            ],
        }
        print(json.dumps(record, ensure_ascii=True))
    return EXIT_OK


def _run_pipeline(args: argparse.Namespace, parser: _Parser) -> int:
    options = _Options(args, parser)
    config = PipelineConfig(
        gpx_path=Path(options.require("gpx", "--gpx")),
        transcript_path=Path(options.require("transcript", "--transcript")),
        out_dir=Path(options.require("out", "--out")),
        transcript_format=options.choice(
            "transcript_format", "--transcript-format", TRANSCRIPT_FORMATS,
            "segment-json",
        ),
        video_meta_path=_optional_path(options.get("video_meta")),
        audio_start=options.get("audio_start"),
        gps_offset_ms=int(options.get("gps_offset_ms", 0)),
        audio_offset_ms=int(options.get("audio_offset_ms", 0)),
        video_offset_ms=int(options.get("video_offset_ms", 0)),
        lexicon_path=_optional_path(options.get("lexicon")),
        tolerance_ms=int(options.get("tolerance_ms", 5000)),
        jitter_floor_m=float(options.get("jitter_floor_m", 1.0)),
        straight_threshold_deg=float(options.get("straight_threshold_deg", 30.0)),
        uturn_threshold_deg=float(options.get("uturn_threshold_deg", 150.0)),
        source_label=options.get("source_label"),
        relativize=bool(options.get("relativize", False)),
    )
    result = run_pipeline(config)
    print(f"events: {result.event_count}")
    print(f"segments: {result.segment_count}")
    print(f"warnings: {result.warning_count}")
    print(f"mismatches: {result.mismatch_count}")
    print(f"wrote: {result.out_dir}")
    return EXIT_OK


def _optional_path(value) -> Path | None:
    return Path(value) if value is not None else None


def _run_stats(args: argparse.Namespace, parser: _Parser) -> int:
    options = _Options(args, parser)
    all_stats = []
    for item in args.sources:
        label, sep, path_text = item.partition("=")
        if not sep:
            path_text, label = item, Path(item).stem
        data = Path(path_text).read_bytes()
        triads = read_triads(data, source=path_text)
        all_stats.append(corpus_stats(label, [t.event for t in triads]))
    report = render_report(all_stats)
    out_path = options.get("out")
    if out_path is None:
        sys.stdout.write(report)
    else:
        Path(out_path).write_text(report, encoding="utf-8", newline="")
    return EXIT_OK


def _run_synth(args: argparse.Namespace, parser: _Parser) -> int:
    options = _Options(args, parser)
    out_dir = options.require("out", "--out")
    style = options.choice("style", "--style", STYLES, "distance-heavy")
    try:
        plan = RoutePlan(
            legs=parse_legs(str(options.get("legs", _DEFAULT_LEGS))),
            speed_mps=float(options.get("speed_mps", 15.0)),
            sample_hz=float(options.get("sample_hz", 1.0)),
            noise_sigma_m=float(options.get("noise_sigma_m", 0.0)),
            seed=int(options.get("seed", 0)),
        )
    except ValueError as exc:
        parser.error(str(exc))
    corpus = generate_instructions(plan, style)
    files = write_corpus(corpus, out_dir)
    print(f"wrote {len(files)} files to {out_dir}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "func", None) is None:
            parser.error("a subcommand is required")
        return args.func(args, parser)
    except SystemExit as exc:
        code = exc.code
        if code is None:
            return EXIT_OK
        return EXIT_USAGE if code == 2 else int(code)
    except DataError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (FileNotFoundError, PermissionError, IsADirectoryError,
            NotADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOINPUT
    except InternalError as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def entry() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    entry()
