import csv

import numpy as np
import pytest

from hrnv import IbiSeries, InputDescriptor, PeakAnnotations, analyze_ibi
from hrnv.errors import EmptyFile, MalformedNumeric, MixedLayout, SchemaViolation
from hrnv.io_formats import (
    RecordError,
    parse_numeric_text,
    read_peaks,
    read_signal,
    signal_from_text,
    write_peaks,
    write_report,
)

from conftest import random_intervals


class TestParse:
    def test_column_layout_seconds(self, tmp_path):
        path = tmp_path / "r.txt"
        path.write_text("0.8\n0.81\n0.79\n")
        out = read_signal(InputDescriptor(path=str(path), kind="rri"))
        assert isinstance(out, IbiSeries)
        assert out.intervals_ms.tolist() == [800.0, 810.0, 790.0]

    def test_row_layout(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text("0.8,0.81,0.79\n")
        out = read_signal(InputDescriptor(path=str(path), kind="rri"))
        assert out.intervals_ms.tolist() == [800.0, 810.0, 790.0]

    def test_millisecond_unit(self, tmp_path):
        path = tmp_path / "r.txt"
        path.write_text("800\n810\n")
        out = read_signal(InputDescriptor(path=str(path), kind="rri", rri_unit="milliseconds"))
        assert out.intervals_ms.tolist() == [800.0, 810.0]

    def test_ecg_kind(self, tmp_path):
        path = tmp_path / "sig.txt"
        path.write_text("0.0\n0.5\n-0.5\n")
        out = read_signal(InputDescriptor(path=str(path), kind="ecg", fs=128.0))
        assert out.fs == 128.0
        assert out.samples.tolist() == [0.0, 0.5, -0.5]
        assert out.record_id == "sig.txt"

    def test_record_id_affixes(self, tmp_path):
        path = tmp_path / "Demo_NSR16786.txt"
        path.write_text("0.8\n0.9\n")
        desc = InputDescriptor(path=str(path), kind="rri", prefix="Demo_", postfix=".txt")
        assert read_signal(desc).record_id == "NSR16786"

    def test_malformed_numeric_reports_position(self):
        with pytest.raises(MalformedNumeric) as err:
            parse_numeric_text("abc\n")
        assert err.value.line == 1
        with pytest.raises(MalformedNumeric) as err:
            parse_numeric_text("0.8\n0.9\nxyz\n")
        assert err.value.line == 3

    def test_row_field_position(self):
        with pytest.raises(MalformedNumeric) as err:
            parse_numeric_text("0.8, oops, 0.9\n")
        assert (err.value.line, err.value.field) == (1, 2)

    def test_empty_file(self):
        with pytest.raises(EmptyFile):
            parse_numeric_text("\n   \n")

    def test_mixed_layout(self):
        with pytest.raises(MixedLayout):
            parse_numeric_text("0.8,0.9\n0.7\n")
        with pytest.raises(MixedLayout):
            parse_numeric_text("0.8\n0.9,0.7\n")

    def test_blank_lines_ignored(self):
        values = parse_numeric_text("\n0.8\n\n0.9\n\n")
        assert values.tolist() == [0.8, 0.9]

    def test_nonpositive_interval_rejected(self):
        desc = InputDescriptor(path="x.txt", kind="rri")
        with pytest.raises(MalformedNumeric):
            signal_from_text(desc, "0.8\n0\n0.9\n")

    def test_non_finite_rejected(self):
        with pytest.raises(MalformedNumeric):
            parse_numeric_text("0.8\nnan\n")

    def test_descriptor_validation(self):
        with pytest.raises(ValueError):
            InputDescriptor(path="x", kind="ecg")
        with pytest.raises(ValueError):
            InputDescriptor(path="x", kind="video")
        with pytest.raises(ValueError):
            InputDescriptor(path="x", kind="rri", rri_unit="hours")


class TestPeaksFiles:
    def test_round_trip(self, tmp_path, rng):
        for trial in range(10):
            count = int(rng.integers(1, 300))
            idx = np.cumsum(rng.integers(20, 400, size=count))
            peaks = PeakAnnotations(record_id=f"rec{trial}", fs=128.0, peaks=idx, version=7)
            path = tmp_path / f"p{trial}.csv"
            write_peaks(str(path), peaks, segment=(5, 10_000_000))
            loaded, segment = read_peaks(str(path))
            assert loaded.record_id == peaks.record_id
            assert loaded.fs == peaks.fs
            assert np.array_equal(loaded.peaks, peaks.peaks)
            assert loaded.version == 0
            assert segment == (5, 10_000_000)

    def test_fractional_fs_round_trip(self, tmp_path):
        peaks = PeakAnnotations(record_id="r", fs=360.0001, peaks=np.array([1, 5]))
        path = tmp_path / "p.csv"
        write_peaks(str(path), peaks)
        loaded, segment = read_peaks(str(path))
        assert loaded.fs == 360.0001
        assert segment is None

    def test_non_increasing_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("# record=r\n# fs_hz=128\n10\n10\n")
        with pytest.raises(SchemaViolation):
            read_peaks(str(path))

    def test_missing_fs_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("# record=r\n10\n20\n")
        with pytest.raises(SchemaViolation):
            read_peaks(str(path))

    def test_missing_record_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("# fs_hz=128\n10\n20\n")
        with pytest.raises(SchemaViolation):
            read_peaks(str(path))

    def test_garbage_index_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("# record=r\n# fs_hz=128\n10\ntwenty\n")
        with pytest.raises(SchemaViolation):
            read_peaks(str(path))


class TestReports:
    def make_reports(self, rng, mode="all", n=2):
        ibi = IbiSeries(record_id="recA", intervals_ms=random_intervals(rng, 300))
        return analyze_ibi(ibi, plan_mode=mode, n=n, m=1)

    def test_header_naming(self, tmp_path, rng):
        reports = self.make_reports(rng, mode="single", n=1)
        path = tmp_path / "report.csv"
        write_report(reports[:1], str(path))
        header = path.read_text().splitlines()[0].split(",")
        assert "hr1v1_rmssd_ms" in header
        assert header[:4] == ["record_id", "n", "m", "error"]
        assert "hr1v1_clean_pct" in header

    def test_na_serialization(self, tmp_path):
        ibi = IbiSeries(record_id="tiny", intervals_ms=np.array([800.0] * 25))
        reports = analyze_ibi(ibi)  # constant: sampen computable(0) but skewness NA
        path = tmp_path / "report.csv"
        write_report(reports, str(path))
        with open(path) as fh:
            rows = list(csv.DictReader(fh))
        assert rows[0]["hr1v1_skewness"] == "NA"
        assert rows[0]["hr1v1_dfa_alpha1"] == "NA"

    def test_empty_report_list(self, tmp_path):
        path = tmp_path / "report.csv"
        write_report([], str(path))
        lines = path.read_text().splitlines()
        assert lines == ["record_id,n,m,error"]

    def test_one_row_per_plan_and_roundtrip(self, tmp_path, rng):
        reports = self.make_reports(rng)
        path = tmp_path / "report.csv"
        write_report(reports, str(path))
        with open(path) as fh:
            rows = list(csv.DictReader(fh))
        assert [(r["n"], r["m"]) for r in rows] == [("1", "1"), ("2", "1"), ("2", "2")]
        # numeric cells round-trip through the 10-significant-digit format
        for report, row in zip(reports, rows):
            prefix = f"hr{report.n}v{report.m}_"
            for name, value in report.metric_values().items():
                cell = row[prefix + name]
                if value is None:
                    assert cell == "NA"
                else:
                    assert float(cell) == pytest.approx(value, rel=1e-9)
            # other plans' columns are empty for this row
            for other in reports:
                if (other.n, other.m) != (report.n, report.m):
                    assert row[f"hr{other.n}v{other.m}_avg_rr_ms"] == ""

    def test_error_rows(self, tmp_path, rng):
        reports = self.make_reports(rng, mode="single", n=1)
        errors = [RecordError(record_id="badfile", stage="MalformedNumeric", message="line 3")]
        path = tmp_path / "report.csv"
        write_report(reports[:1], str(path), errors=errors)
        with open(path) as fh:
            rows = list(csv.DictReader(fh))
        assert rows[-1]["record_id"] == "badfile"
        assert "MalformedNumeric" in rows[-1]["error"]
        assert rows[0]["error"] == ""
