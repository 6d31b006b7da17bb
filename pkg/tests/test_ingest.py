"""Sensor parsing, stream alignment, and phase segmentation."""

import numpy as np
import pytest

from emowear import ingest
from emowear.errors import (
    EmptyStream,
    InvalidMarkers,
    MalformedRow,
    MarkerOutOfRange,
    MissingChannel,
    NonMonotonicTime,
    NoOverlap,
)
from emowear.ingest import (
    ChannelSchema,
    PhaseMarkers,
    SensorStream,
    align_streams,
    parse_marker_file,
    parse_sensor_csv,
    segment_phases,
    write_marker_file,
    write_sensor_csv,
)


def _csv(text: str) -> bytes:
    return text.encode("utf-8")


class TestParseSensorCsv:
    def test_identity_parse_infers_rate(self):
        stream = parse_sensor_csv(
            _csv("timestamp,HeartRate\n0,1.0\n0.25,2.0\n0.5,3.0\n"),
            ChannelSchema(channel="HeartRate"),
        )
        assert np.array_equal(stream.timestamps, [0.0, 0.25, 0.5])
        assert np.array_equal(stream.values, [1.0, 2.0, 3.0])
        assert stream.native_rate == pytest.approx(4.0)

    def test_duplicate_timestamp_keeps_last(self):
        stream = parse_sensor_csv(
            _csv("timestamp,HeartRate\n0,1.0\n0.25,2.0\n0.25,2.5\n0.5,3.0\n"),
            ChannelSchema(channel="HeartRate"),
        )
        assert np.array_equal(stream.timestamps, [0.0, 0.25, 0.5])
        assert stream.values[1] == 2.5

    def test_malformed_row_reports_line(self):
        with pytest.raises(MalformedRow) as exc:
            parse_sensor_csv(
                _csv("timestamp,HeartRate\n0,1.0\n0.25,2.0\n0.75, abc\n"),
                ChannelSchema(channel="HeartRate"),
            )
        assert exc.value.line == 4

    def test_empty_stream(self):
        with pytest.raises(EmptyStream):
            parse_sensor_csv(_csv("timestamp,HeartRate\n"), ChannelSchema(channel="HeartRate"))

    def test_decreasing_time_rejected(self):
        with pytest.raises(NonMonotonicTime):
            parse_sensor_csv(
                _csv("timestamp,HeartRate\n0,1.0\n0.5,2.0\n0.25,3.0\n"),
                ChannelSchema(channel="HeartRate"),
            )

    def test_irregular_rate(self):
        stream = parse_sensor_csv(
            _csv("timestamp,HeartRate\n0,1.0\n0.25,2.0\n1.5,3.0\n"),
            ChannelSchema(channel="HeartRate"),
        )
        assert stream.native_rate == ingest.IRREGULAR

    def test_wide_file_selects_column(self):
        stream = parse_sensor_csv(
            _csv("timestamp,Yaw,Pitch\n0,10,20\n1,11,21\n"),
            ChannelSchema(channel="Pitch"),
        )
        assert np.array_equal(stream.values, [20.0, 21.0])

    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        stream = SensorStream(
            channel_name="Yaw",
            timestamps=np.sort(rng.uniform(0, 100, size=50)),
            values=rng.normal(size=50),
        )
        path = tmp_path / "yaw.csv"
        write_sensor_csv(stream, path)
        back = parse_sensor_csv(path, ChannelSchema(channel="Yaw"))
        assert np.array_equal(back.timestamps, stream.timestamps)
        assert np.array_equal(back.values, stream.values)


class TestAlignStreams:
    def test_linear_signal_is_interpolation_exact(self):
        t = np.arange(0, 10, 0.25)
        stream = SensorStream("Yaw", t, t.copy(), native_rate=4.0)
        grid, matrix, names = align_streams([stream], rate=2.0)
        assert names == ("Yaw",)
        assert np.allclose(matrix[:, 0], grid, atol=1e-12)

    def test_overlap_interval_row_count(self):
        a = SensorStream("Yaw", np.array([1.0, 3.0]), np.array([0.0, 1.0]))
        b = SensorStream("Pitch", np.array([0.0, 3.5]), np.array([5.0, 6.0]))
        grid, matrix, _ = align_streams([a, b], rate=1.0)
        assert np.array_equal(grid, [1.0, 2.0, 3.0])
        assert matrix.shape == (3, 2)

    def test_native_values_reproduced_when_rate_divides(self):
        rng = np.random.default_rng(1)
        t = np.arange(0, 20, 0.25)  # 4 Hz
        values = rng.normal(size=t.size)
        stream = SensorStream("Yaw", t, values)
        grid, matrix, _ = align_streams([stream], rate=2.0)
        native_at_grid = values[np.searchsorted(t, grid)]
        assert np.allclose(matrix[:, 0], native_at_grid, atol=1e-12)

    def test_no_overlap(self):
        a = SensorStream("Yaw", np.array([0.0, 10.0]), np.array([0.0, 1.0]))
        b = SensorStream("Pitch", np.array([20.0, 30.0]), np.array([0.0, 1.0]))
        with pytest.raises(NoOverlap):
            align_streams([a, b], rate=1.0)

    def test_required_channels_enforced(self):
        a = SensorStream("Yaw", np.array([0.0, 10.0]), np.array([0.0, 1.0]))
        with pytest.raises(MissingChannel):
            align_streams([a], rate=1.0, required_channels=ingest.CHANNELS)


class TestMarkers:
    def test_ordering_enforced(self):
        with pytest.raises(InvalidMarkers):
            PhaseMarkers(t1=0, t2=1200, t3=1200, t4=3600, t5=4800)

    def test_sub_markers_validated(self):
        with pytest.raises(InvalidMarkers):
            PhaseMarkers(t1=0, t2=10, t3=20, t4=30, t5=40, as_start=25, m_start=28)

    def test_marker_file_round_trip(self, tmp_path):
        markers = PhaseMarkers(t1=0, t2=1200, t3=2400, t4=3600, t5=4800,
                               as_start=1200, m_start=1800)
        path = tmp_path / "markers.txt"
        write_marker_file(markers, path)
        assert parse_marker_file(path) == markers

    def test_marker_file_missing_key(self, tmp_path):
        path = tmp_path / "markers.txt"
        path.write_text("T1=0\nT2=10\n")
        with pytest.raises(InvalidMarkers):
            parse_marker_file(path)


class TestSegmentPhases:
    def test_protocol_durations_at_1hz(self):
        # 20 min pre-stress, 20 min stress, 40 min recovery.
        markers = PhaseMarkers(t1=0, t2=1200, t3=2400, t4=3600, t5=4800)
        ts = np.arange(0.0, 4801.0)
        ranges = segment_phases(ts, markers)
        assert ranges["stress"] == (1200, 2400)
        assert ranges["pre_stress"] == (0, 1200)
        assert ranges["recovery"] == (2400, 4801)

    def test_partition_covers_all_rows(self):
        markers = PhaseMarkers(t1=0, t2=7, t3=13, t4=17, t5=21)
        ts = np.linspace(0, 21, 85)
        ranges = segment_phases(ts, markers)
        spans = [ranges[p] for p in ("pre_stress", "stress", "recovery")]
        assert spans[0][0] == 0 and spans[-1][1] == ts.size
        for (_, stop), (start, _) in zip(spans, spans[1:]):
            assert stop == start

    def test_sub_segments(self):
        markers = PhaseMarkers(t1=0, t2=10, t3=20, t4=25, t5=30, as_start=10, m_start=15)
        ts = np.arange(0.0, 31.0)
        ranges = segment_phases(ts, markers)
        assert ranges["stress/AS"] == (10, 15)
        assert ranges["stress/M"] == (15, 20)

    def test_marker_beyond_span(self):
        markers = PhaseMarkers(t1=0, t2=10, t3=20, t4=25, t5=30)
        with pytest.raises(MarkerOutOfRange):
            segment_phases(np.arange(0.0, 25.0), markers)
