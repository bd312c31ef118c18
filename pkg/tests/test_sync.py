"""Timeline synchronization: frame arithmetic and event placement."""

from __future__ import annotations

import pytest

from drivetriad import (
    StreamOffsets,
    Transcript,
    TranscriptSegment,
    VideoIndex,
    build_events,
    frame_index_at,
)
from drivetriad.errors import (
    AfterVideoEnd,
    BeforeVideoStart,
    InvalidAnchor,
    NoUsableEvents,
)

from helpers import straight_north_track, track_from


def transcript(*rows, anchor=None):
    return Transcript(
        tuple(TranscriptSegment(s, e, t) for s, e, t in rows), audio_start_ms=anchor
    )


class TestFrameIndexAt:
    VIDEO = VideoIndex(start_ms=1_000_000, fps=30.0, frame_count=3000)

    def test_start_is_frame_zero(self):
        assert frame_index_at(self.VIDEO, 1_000_000) == 0

    def test_one_second_at_30fps(self):
        assert frame_index_at(self.VIDEO, 1_001_000) == 30

    def test_just_under_one_second(self):
        assert frame_index_at(self.VIDEO, 1_000_999) == 29

    def test_exact_multiple_has_no_float_drift(self):
        # 300 ms at 10 fps must be exactly frame 3 (0.3*10 would give
        # 2.999... if computed as (ms/1000)*fps).
        video = VideoIndex(start_ms=0, fps=10.0, frame_count=100)
        assert frame_index_at(video, 300) == 3

    def test_fractional_fps(self):
        # Frame 30 starts at 30/29.97 s ~ 1001.001 ms, so 1001 ms is still
        # inside frame 29 and 1002 ms is inside frame 30.
        video = VideoIndex(start_ms=0, fps=29.97, frame_count=100_000)
        assert frame_index_at(video, 1001) == 29
        assert frame_index_at(video, 1002) == 30

    def test_before_start_raises(self):
        with pytest.raises(BeforeVideoStart):
            frame_index_at(self.VIDEO, 999_999)

    def test_before_start_clamps_to_zero(self):
        assert frame_index_at(self.VIDEO, 999_999, clamp=True) == 0

    def test_past_end_raises(self):
        # Frame 3000 would start at +100 s; the last valid frame is 2999.
        with pytest.raises(AfterVideoEnd):
            frame_index_at(self.VIDEO, 1_100_000)

    def test_past_end_clamps_to_last(self):
        assert frame_index_at(self.VIDEO, 1_100_000, clamp=True) == 2999

    def test_last_millisecond_of_final_frame(self):
        assert frame_index_at(self.VIDEO, 1_099_999) == 2999

    def test_zero_frames_always_raises(self):
        empty = VideoIndex(start_ms=0, fps=30.0, frame_count=0)
        with pytest.raises(AfterVideoEnd):
            frame_index_at(empty, 0)
        with pytest.raises(AfterVideoEnd):
            frame_index_at(empty, 0, clamp=True)


class TestBuildEvents:
    def _track(self):
        # 60 s of driving north, one fix per second.
        return straight_north_track(n=61, start_ms=1_000_000)

    def test_basic_placement(self):
        events, warnings = build_events(
            transcript((5.0, 6.0, "Turn left."), (20.0, 21.0, "Continue for half a mile.")),
            self._track(),
            audio_start_ms=1_000_000,
        )
        assert warnings == []
        assert [e.id for e in events] == [0, 1]
        assert [e.t_ms for e in events] == [1_005_000, 1_020_000]
        assert {c.value for c in events[0].classes} == {"Turn"}
        assert events[0].geo.t_ms == 1_005_000
        assert events[0].heading_deg == pytest.approx(0.0, abs=1e-6)

    def test_explicit_anchor_wins_over_embedded(self):
        t = transcript((5.0, 6.0, "Turn left."), anchor=999_000_000)
        events, _ = build_events(t, self._track(), audio_start_ms=1_000_000)
        assert events[0].t_ms == 1_005_000

    def test_embedded_anchor_used_when_no_explicit(self):
        t = transcript((5.0, 6.0, "Turn left."), anchor=1_000_000)
        events, _ = build_events(t, self._track())
        assert events[0].t_ms == 1_005_000

    def test_no_anchor_anywhere_rejected(self):
        with pytest.raises(InvalidAnchor):
            build_events(transcript((5.0, 6.0, "Turn left.")), self._track())

    def test_audio_offset_shifts_events(self):
        events, _ = build_events(
            transcript((5.0, 6.0, "Turn left.")),
            self._track(),
            audio_start_ms=1_000_000,
            offsets=StreamOffsets(audio_ms=2_000),
        )
        assert events[0].t_ms == 1_007_000

    def test_gps_offset_shifts_track(self):
        # Track shifted +5 s: an event at +2 s now precedes the track start
        # by 3 s, still within the default 5 s tolerance, so it clamps to
        # the first fix.
        events, _ = build_events(
            transcript((2.0, 3.0, "Turn left.")),
            self._track(),
            audio_start_ms=1_000_000,
            offsets=StreamOffsets(gps_ms=5_000),
        )
        assert events[0].geo.lat_deg == 0.0

    def test_out_of_span_dropped_with_warning(self):
        events, warnings = build_events(
            transcript((5.0, 6.0, "Turn left."), (500.0, 501.0, "Turn right.")),
            self._track(),
            audio_start_ms=1_000_000,
        )
        assert len(events) == 1
        assert len(warnings) == 1
        assert "outside the track span" in warnings[0]

    def test_unclassifiable_text_dropped_with_warning(self):
        # "..." normalizes to nothing; it cannot be placed as an event.
        events, warnings = build_events(
            transcript((5.0, 6.0, "Turn left."), (10.0, 11.0, "...")),
            self._track(),
            audio_start_ms=1_000_000,
        )
        assert len(events) == 1
        assert any("no classifiable" in w for w in warnings)

    def test_unmatched_text_survives_with_empty_classes(self):
        # Real words with no navigation cue still become an event; empty
        # class sets are counted, not discarded.
        events, warnings = build_events(
            transcript((5.0, 6.0, "Nice weather today.")),
            self._track(),
            audio_start_ms=1_000_000,
        )
        assert warnings == []
        assert events[0].classes == frozenset()

    def test_nothing_usable_raises(self):
        with pytest.raises(NoUsableEvents):
            build_events(
                transcript((500.0, 501.0, "Turn left.")),
                self._track(),
                audio_start_ms=1_000_000,
            )

    def test_degenerate_heading_warns_on_event(self):
        # All fixes at the same place: position interpolates fine, heading
        # cannot be derived.
        parked = track_from([(10.0, 20.0)] * 10, start_ms=1_000_000)
        events, warnings = build_events(
            transcript((3.0, 4.0, "Turn left.")),
            parked,
            audio_start_ms=1_000_000,
        )
        assert warnings == []
        assert events[0].heading_deg is None
        assert any("heading undefined" in w for w in events[0].warnings)

    def test_frame_index_attached(self):
        video = VideoIndex(start_ms=1_000_000, fps=30.0, frame_count=10_000)
        events, _ = build_events(
            transcript((5.0, 6.0, "Turn left.")),
            self._track(),
            video=video,
            audio_start_ms=1_000_000,
        )
        assert events[0].frame_index == 150

    def test_video_offset_shifts_frames(self):
        video = VideoIndex(start_ms=1_000_000, fps=30.0, frame_count=10_000)
        events, _ = build_events(
            transcript((5.0, 6.0, "Turn left.")),
            self._track(),
            video=video,
            audio_start_ms=1_000_000,
            offsets=StreamOffsets(video_ms=1_000),
        )
        # Video now starts 1 s later, so the event is 4 s into it.
        assert events[0].frame_index == 120

    def test_event_outside_video_keeps_event_with_warning(self):
        video = VideoIndex(start_ms=1_000_000, fps=30.0, frame_count=30)  # 1 s long
        events, warnings = build_events(
            transcript((5.0, 6.0, "Turn left.")),
            self._track(),
            video=video,
            audio_start_ms=1_000_000,
        )
        assert warnings == []
        assert len(events) == 1
        assert events[0].frame_index is None
        assert any("no video frame" in w for w in events[0].warnings)

    def test_no_video_means_no_frame(self):
        events, _ = build_events(
            transcript((5.0, 6.0, "Turn left.")),
            self._track(),
            audio_start_ms=1_000_000,
        )
        assert events[0].frame_index is None

    def test_ids_follow_time_order(self):
        # Segments given out of order still come back sorted with 0..n-1.
        events, _ = build_events(
            transcript((30.0, 31.0, "Turn right."), (5.0, 6.0, "Turn left.")),
            self._track(),
            audio_start_ms=1_000_000,
        )
        assert [e.id for e in events] == [0, 1]
        assert events[0].text == "Turn left."
        assert events[0].t_ms < events[1].t_ms
