"""Parsers for GPX tracks, transcripts, and video sidecars."""

from __future__ import annotations

import json

import pytest

from drivetriad import (
    Transcript,
    TranscriptSegment,
    absolutize,
    parse_gpx,
    parse_transcript,
    parse_video_meta,
)
from drivetriad.errors import (
    EmptyTrack,
    EmptyTranscript,
    EncodingError,
    InvalidAnchor,
    InvalidFps,
    MissingTimestamp,
    NonMonotoneTrack,
    ParseError,
)

GPX_11 = b"""<?xml version="1.0" encoding="UTF-8"?>
<gpx version="1.1" creator="test" xmlns="http://www.topografix.com/GPX/1/1">
  <trk><trkseg>
    <trkpt lat="40.0" lon="-105.0"><ele>1600.0</ele><time>2024-06-01T12:00:00Z</time></trkpt>
    <trkpt lat="40.001" lon="-105.0"><time>2024-06-01T12:00:10Z</time></trkpt>
  </trkseg></trk>
</gpx>
"""

GPX_10 = b"""<?xml version="1.0"?>
<gpx version="1.0" xmlns="http://www.topografix.com/GPX/1/0">
  <trk><trkseg>
    <trkpt lat="1.0" lon="2.0"><time>2024-06-01T12:00:00Z</time></trkpt>
    <trkpt lat="1.1" lon="2.0"><time>2024-06-01T12:00:05Z</time></trkpt>
  </trkseg></trk>
</gpx>
"""

GPX_NO_NS = b"""<gpx><trk><trkseg>
  <trkpt lat="5" lon="6"><time>2024-06-01T12:00:00Z</time></trkpt>
  <trkpt lat="5.1" lon="6"><time>2024-06-01T12:00:01Z</time></trkpt>
</trkseg></trk></gpx>
"""


class TestParseGpx:
    def test_gpx_11_with_elevation(self):
        log = parse_gpx(GPX_11, source_id="drive")
        assert len(log) == 2
        assert log.source_id == "drive"
        assert log.points[0].lat_deg == 40.0
        assert log.points[0].ele_m == 1600.0
        assert log.points[1].ele_m is None
        assert log.points[1].t_ms - log.points[0].t_ms == 10_000

    def test_gpx_10_namespace(self):
        assert len(parse_gpx(GPX_10)) == 2

    def test_namespace_free_gpx(self):
        assert len(parse_gpx(GPX_NO_NS)) == 2

    def test_multiple_segments_concatenate(self):
        data = b"""<gpx><trk>
          <trkseg><trkpt lat="0" lon="0"><time>2024-01-01T00:00:00Z</time></trkpt></trkseg>
          <trkseg><trkpt lat="0.1" lon="0"><time>2024-01-01T00:00:05Z</time></trkpt></trkseg>
        </trk></gpx>"""
        assert len(parse_gpx(data)) == 2

    def test_missing_lat_rejected(self):
        data = b'<gpx><trk><trkseg><trkpt lon="1"><time>2024-01-01T00:00:00Z</time></trkpt></trkseg></trk></gpx>'
        with pytest.raises(ParseError):
            parse_gpx(data)

    def test_missing_time_rejected(self):
        data = b'<gpx><trk><trkseg><trkpt lat="1" lon="1"/></trkseg></trk></gpx>'
        with pytest.raises(MissingTimestamp):
            parse_gpx(data)

    def test_decreasing_time_rejected(self):
        data = b"""<gpx><trk><trkseg>
          <trkpt lat="0" lon="0"><time>2024-01-01T00:00:10Z</time></trkpt>
          <trkpt lat="0.1" lon="0"><time>2024-01-01T00:00:05Z</time></trkpt>
        </trkseg></trk></gpx>"""
        with pytest.raises(NonMonotoneTrack):
            parse_gpx(data)

    def test_empty_gpx_rejected(self):
        with pytest.raises(EmptyTrack):
            parse_gpx(b"<gpx><trk><trkseg></trkseg></trk></gpx>")

    def test_malformed_xml_rejected(self):
        with pytest.raises(ParseError):
            parse_gpx(b"<gpx><trk>")

    def test_non_utf8_rejected(self):
        with pytest.raises(EncodingError):
            parse_transcript(b"\xff\xfe broken", "plain-lines")


class TestParseSrt:
    SRT = b"""1
00:00:01,500 --> 00:00:03,000
Turn left onto Oak Street.

2
00:00:05.000 --> 00:00:06,250
Continue straight
for two miles.
"""

    def test_blocks_and_timing(self):
        t = parse_transcript(self.SRT, "srt")
        assert len(t.segments) == 2
        first, second = t.segments
        assert first.start_s == pytest.approx(1.5)
        assert first.end_s == pytest.approx(3.0)
        assert first.text == "Turn left onto Oak Street."
        # Multi-line payloads join with a space, dot-millis accepted.
        assert second.start_s == pytest.approx(5.0)
        assert second.text == "Continue straight for two miles."

    def test_index_line_optional(self):
        data = b"00:00:00,000 --> 00:00:01,000\nHello there.\n"
        t = parse_transcript(data, "srt")
        assert t.segments[0].text == "Hello there."

    def test_missing_timing_rejected(self):
        with pytest.raises(ParseError):
            parse_transcript(b"1\nJust some words\n", "srt")

    def test_end_before_start_rejected(self):
        with pytest.raises(ParseError):
            parse_transcript(
                b"1\n00:00:05,000 --> 00:00:01,000\nBackwards.\n", "srt"
            )


class TestParseSegmentJson:
    def test_basic(self):
        data = json.dumps(
            {
                "segments": [
                    {"start": 0.5, "end": 2.0, "text": "Turn right."},
                    {"start": 3, "end": 4, "text": "Stop."},
                ]
            }
        ).encode()
        t = parse_transcript(data, "segment-json")
        assert len(t.segments) == 2
        assert t.audio_start_ms is None

    def test_embedded_anchor(self):
        data = json.dumps(
            {
                "audio_start_utc": "2024-06-01T12:00:00Z",
                "segments": [{"start": 1.0, "end": 2.0, "text": "Go."}],
            }
        ).encode()
        t = parse_transcript(data, "segment-json")
        assert t.audio_start_ms == 1_717_243_200_000

    def test_bad_anchor_type_rejected(self):
        data = json.dumps(
            {"audio_start_utc": 12345, "segments": [{"start": 0, "end": 1, "text": "x"}]}
        ).encode()
        with pytest.raises(ParseError):
            parse_transcript(data, "segment-json")

    def test_error_names_offending_segment(self):
        data = json.dumps(
            {
                "segments": [
                    {"start": 0, "end": 1, "text": "ok"},
                    {"start": 2, "end": 1, "text": "bad"},
                ]
            }
        ).encode()
        with pytest.raises(ParseError, match="segment 1"):
            parse_transcript(data, "segment-json")

    def test_negative_start_rejected(self):
        data = json.dumps(
            {"segments": [{"start": -1, "end": 1, "text": "x"}]}
        ).encode()
        with pytest.raises(ParseError):
            parse_transcript(data, "segment-json")

    def test_non_object_rejected(self):
        with pytest.raises(ParseError):
            parse_transcript(b"[1, 2, 3]", "segment-json")

    def test_empty_segments_rejected(self):
        with pytest.raises(EmptyTranscript):
            parse_transcript(b'{"segments": []}', "segment-json")


class TestParsePlainLines:
    def test_tab_separated(self):
        data = b"0.0\t2.0\tTurn left.\n# a comment\n\n3.5\t5.0\tThen stop.\n"
        t = parse_transcript(data, "plain-lines")
        assert len(t.segments) == 2
        assert t.segments[1].start_s == pytest.approx(3.5)
        assert t.segments[1].text == "Then stop."

    def test_bad_number_names_line(self):
        with pytest.raises(ParseError, match="line 2"):
            parse_transcript(b"0\t1\tok\nzero\tone\tbad\n", "plain-lines")

    def test_missing_column_rejected(self):
        with pytest.raises(ParseError):
            parse_transcript(b"0.0\tno text column\n", "plain-lines")

    def test_unknown_format_rejected(self):
        with pytest.raises(ValueError):
            parse_transcript(b"", "csv")


class TestMergeOverlaps:
    def test_overlapping_segments_merge(self):
        data = json.dumps(
            {
                "segments": [
                    {"start": 0.0, "end": 2.0, "text": "Turn left"},
                    {"start": 1.5, "end": 3.0, "text": "onto Oak Street."},
                    {"start": 5.0, "end": 6.0, "text": "Then stop."},
                ]
            }
        ).encode()
        t = parse_transcript(data, "segment-json")
        assert len(t.segments) == 2
        merged = t.segments[0]
        assert merged.start_s == 0.0
        assert merged.end_s == 3.0
        assert merged.text == "Turn left onto Oak Street."

    def test_touching_segments_stay_separate(self):
        data = json.dumps(
            {
                "segments": [
                    {"start": 0.0, "end": 2.0, "text": "One."},
                    {"start": 2.0, "end": 4.0, "text": "Two."},
                ]
            }
        ).encode()
        t = parse_transcript(data, "segment-json")
        assert len(t.segments) == 2

    def test_out_of_order_input_is_sorted(self):
        data = json.dumps(
            {
                "segments": [
                    {"start": 5.0, "end": 6.0, "text": "Later."},
                    {"start": 0.0, "end": 1.0, "text": "Earlier."},
                ]
            }
        ).encode()
        t = parse_transcript(data, "segment-json")
        assert [s.text for s in t.segments] == ["Earlier.", "Later."]


class TestParseVideoMeta:
    GOOD = json.dumps(
        {"start_time": "2024-06-01T12:00:00Z", "fps": 29.97, "frame_count": 54000}
    ).encode()

    def test_good_sidecar(self):
        v = parse_video_meta(self.GOOD)
        assert v.start_ms == 1_717_243_200_000
        assert v.fps == pytest.approx(29.97)
        assert v.frame_count == 54000

    def test_missing_field_named_in_error(self):
        data = json.dumps({"start_time": "2024-06-01T12:00:00Z", "fps": 30}).encode()
        with pytest.raises(ParseError, match="frame_count"):
            parse_video_meta(data)

    def test_zero_fps_rejected(self):
        data = json.dumps(
            {"start_time": "2024-06-01T12:00:00Z", "fps": 0, "frame_count": 10}
        ).encode()
        with pytest.raises(InvalidFps):
            parse_video_meta(data)

    def test_negative_frame_count_rejected(self):
        data = json.dumps(
            {"start_time": "2024-06-01T12:00:00Z", "fps": 30, "frame_count": -1}
        ).encode()
        with pytest.raises(ParseError):
            parse_video_meta(data)

    def test_shifted(self):
        v = parse_video_meta(self.GOOD)
        assert v.shifted(250).start_ms == v.start_ms + 250
        assert v.shifted(0) is v


class TestAbsolutize:
    def _transcript(self):
        return Transcript(
            (
                TranscriptSegment(0.5, 2.0, "Turn left."),
                TranscriptSegment(3.25, 4.0, "Then stop."),
            )
        )

    def test_anchoring_and_rounding(self):
        rows = absolutize(self._transcript(), audio_start_ms=1_000_000)
        assert rows == [
            (1_000_500, "Turn left."),
            (1_003_250, "Then stop."),
        ]

    def test_offset_applies(self):
        rows = absolutize(self._transcript(), audio_start_ms=1_000_000, offset_ms=-200)
        assert rows[0][0] == 1_000_300

    def test_pre_epoch_rejected(self):
        with pytest.raises(InvalidAnchor):
            absolutize(self._transcript(), audio_start_ms=0, offset_ms=-1_000_000)
