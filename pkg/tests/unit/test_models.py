"""
Unit tests for the BenchRun and BenchRow data classes
"""
import pytest

from src.exceptions import ConfigurationError
from src.models.bench_run import BenchRow, BenchRun, CSV_COLUMNS, DEFAULT_DURATIONS_S


def row(duration, rtf=0.1):
    return BenchRow(duration, "summary_mixing", 640.0, "infinite", rtf * duration * 1000.0,
                    rtf * duration * 1000.0, rtf, 1024)


class TestBenchRow:
    """Test BenchRow dataclass"""

    @pytest.mark.unit
    @pytest.mark.dataclass
    def test_to_dict_column_order(self):
        """Test that to_dict follows the CSV column order"""
        data = row(5.0).to_dict()
        assert list(data) == CSV_COLUMNS
        assert data['measured_peak_bytes'] is None

    @pytest.mark.unit
    @pytest.mark.dataclass
    def test_wall_seconds(self):
        """Test conversion of the mean wall time to seconds"""
        assert row(20.0, 0.5).wall_seconds == pytest.approx(10.0)


class TestBenchRun:
    """Test BenchRun dataclass"""

    @pytest.mark.unit
    @pytest.mark.dataclass
    def test_defaults(self):
        """Test the default benchmark settings"""
        run = BenchRun("cpu", "mhsa")
        assert run.durations_s == DEFAULT_DURATIONS_S
        assert run.repeats == 100
        assert run.chunk_ms == 640.0
        assert run.frame_shift_ms == 10.0
        assert run.left_context_label == "infinite"
        assert run.results == []

    @pytest.mark.unit
    @pytest.mark.positive
    def test_durations_sorted(self):
        """Test that durations are stored ascending as floats"""
        run = BenchRun("cpu", "mhsa", durations_s=[30, 5, 10], left_context=2)
        assert run.durations_s == [5.0, 10.0, 30.0]
        assert run.left_context_label == "2"

    @pytest.mark.unit
    @pytest.mark.positive
    def test_add_row_keeps_order(self):
        """Test that rows stay sorted by duration"""
        run = BenchRun("cpu", "summary_mixing")
        for duration in (60.0, 5.0, 20.0):
            run.add_row(row(duration))
        assert [r.duration_s for r in run.results] == [5.0, 20.0, 60.0]

    @pytest.mark.unit
    @pytest.mark.dataclass
    def test_to_dict(self):
        """Test dictionary conversion including rows"""
        run = BenchRun("cpu", "summary_mixing", durations_s=[5], repeats=2, seed=7)
        run.add_row(row(5.0))
        data = run.to_dict()
        assert data['config_id'] == "cpu"
        assert data['left_context'] == "infinite"
        assert data['seed'] == 7
        assert data['results'][0]['duration_s'] == 5.0

    @pytest.mark.unit
    @pytest.mark.negative
    @pytest.mark.parametrize("overrides,message", [
        ({'durations_s': []}, "at least one"),
        ({'durations_s': [5, -1]}, "positive"),
        ({'repeats': 0}, "repeats"),
        ({'warmup': 0}, "warmup"),
        ({'chunk_ms': 0}, "chunk_ms"),
    ])
    def test_invalid_settings(self, overrides, message):
        """Test rejection of invalid benchmark settings"""
        with pytest.raises(ConfigurationError, match=message):
            BenchRun("cpu", "mhsa", **overrides)
