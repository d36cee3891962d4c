import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hrnv import DetectorConfig, EcgRecord, PeakAnnotations
from hrnv.errors import DuplicatePeak, OutOfRange, SamplingRateTooLow, SegmentTooShort, UnknownPeak
from hrnv.qrs import apply_peak_edits, detect_r_peaks, remove_baseline, snap_peaks

from synth import synthetic_ecg

FS = 128.0


def record(samples, fs=FS, segment=None):
    return EcgRecord(record_id="ecg", fs=fs, samples=samples, segment=segment)


def match_counts(detected, truth, tol_samples):
    """Greedy one-to-one matching of detected to true peaks within tol."""
    truth = list(truth)
    matched = 0
    errors = []
    for d in detected:
        if not truth:
            break
        j = int(np.argmin(np.abs(np.asarray(truth) - d)))
        if abs(truth[j] - d) <= tol_samples:
            errors.append(abs(truth[j] - d))
            truth.pop(j)
            matched += 1
    return matched, errors


class TestRemoveBaseline:
    def test_constant_becomes_zero(self):
        out = remove_baseline(record(np.full(2000, 3.7)))
        assert np.allclose(out.samples, 0.0, atol=1e-12)

    def test_drift_band_sinusoid_suppressed(self):
        t = np.arange(int(30 * FS)) / FS
        drift = np.sin(2 * np.pi * 0.2 * t)
        out = remove_baseline(record(drift))
        assert np.max(np.abs(out.samples)) < 0.1

    def test_qrs_amplitude_preserved_under_ramp(self):
        clean, truth = synthetic_ecg(60.0, FS, 70.0)
        ramp = np.linspace(0.0, 2.0, len(clean))
        out = remove_baseline(record(clean + ramp))
        for idx in truth[1:-1]:
            assert out.samples[idx] == pytest.approx(clean[idx], abs=0.05)

    def test_preserves_metadata(self):
        out = remove_baseline(record(np.zeros(500), segment=(10, 400)))
        assert out.segment == (10, 400)
        assert out.record_id == "ecg"


class TestDetect:
    def test_noiseless_60_bpm(self):
        x, truth = synthetic_ecg(300.0, FS, 60.0, modulation_depth=0.0)
        peaks = detect_r_peaks(record(x))
        assert abs(len(peaks) - len(truth)) <= 1
        assert abs(len(peaks) - 300) <= 1
        matched, errors = match_counts(peaks.peaks, truth, tol_samples=0.040 * FS)
        assert matched >= len(truth) - 1
        assert max(errors) <= 0.040 * FS

    def test_flat_line_yields_no_peaks(self):
        peaks = detect_r_peaks(record(np.zeros(int(10 * FS))))
        assert len(peaks) == 0

    def test_inverted_signal_snaps_to_minima(self):
        x, truth = synthetic_ecg(120.0, FS, 65.0)
        upright = detect_r_peaks(record(x))
        flipped = detect_r_peaks(record(-x))
        assert len(upright) == len(flipped)
        inverted_record = record(-x)
        for p in flipped.peaks:
            lo, hi = int(p) - 3, int(p) + 4
            assert inverted_record.samples[p] == np.min(inverted_record.samples[lo:hi])

    def test_segment_restricts_peaks(self):
        x, truth = synthetic_ecg(120.0, FS, 60.0)
        seg = (int(30 * FS), int(90 * FS))
        peaks = detect_r_peaks(record(x, segment=seg))
        assert np.all(peaks.peaks >= seg[0])
        assert np.all(peaks.peaks < seg[1])
        expected = [t for t in truth if seg[0] <= t < seg[1]]
        assert abs(len(peaks) - len(expected)) <= 1

    def test_sampling_rate_gate(self):
        with pytest.raises(SamplingRateTooLow):
            detect_r_peaks(record(np.zeros(500), fs=50.0))

    def test_segment_too_short(self):
        with pytest.raises(SegmentTooShort):
            detect_r_peaks(record(np.zeros(int(1.5 * FS))))

    def test_refractory_invariant(self):
        x, _ = synthetic_ecg(120.0, FS, 95.0, noise_snr_db=15.0, seed=4)
        cfg = DetectorConfig(refractory_ms=250.0)
        peaks = detect_r_peaks(record(x), cfg)
        assert len(peaks) > 50
        assert np.all(np.diff(peaks.peaks) >= int(round(0.250 * FS)))

    def test_shift_equivariance(self):
        x, _ = synthetic_ecg(60.0, FS, 72.0)
        k = 37
        shifted = np.concatenate([x[:k] * 0, x[:-k]])
        base = detect_r_peaks(record(x)).peaks
        moved = detect_r_peaks(record(shifted)).peaks
        # compare interior peaks away from the boundary
        base_interior = base[(base > 5 * FS) & (base < 50 * FS)]
        moved_interior = moved[(moved > 5 * FS + k) & (moved < 50 * FS + k)]
        assert len(base_interior) == len(moved_interior)
        assert np.all(np.abs(moved_interior - k - base_interior) <= 1)

    def test_noisy_records_high_sensitivity(self):
        for seed, hr in ((0, 55.0), (1, 75.0), (2, 95.0)):
            x, truth = synthetic_ecg(300.0, FS, hr, noise_snr_db=20.0, seed=seed)
            peaks = detect_r_peaks(record(x))
            matched, _ = match_counts(peaks.peaks, truth, tol_samples=0.040 * FS)
            sensitivity = matched / len(truth)
            ppv = matched / len(peaks)
            assert sensitivity >= 0.99
            assert ppv >= 0.99


class TestSnap:
    def make_pulse(self, apex=100, width=5, n=300):
        x = np.zeros(n)
        x[apex - width: apex + width + 1] = np.concatenate(
            [np.linspace(0, 1, width + 1), np.linspace(1, 0, width + 1)[1:]]
        )
        return x

    def test_fixed_point(self):
        x = self.make_pulse()
        peaks = PeakAnnotations(record_id="p", fs=FS, peaks=np.array([100]))
        out = snap_peaks(record(x), peaks, "local_max", 50.0)
        assert out.peaks.tolist() == [100]

    def test_moves_to_apex(self):
        x = self.make_pulse()
        peaks = PeakAnnotations(record_id="p", fs=FS, peaks=np.array([97]))
        out = snap_peaks(record(x), peaks, "local_max", 50.0)
        assert out.peaks.tolist() == [100]

    def test_local_min_mode(self):
        x = -self.make_pulse()
        peaks = PeakAnnotations(record_id="p", fs=FS, peaks=np.array([96]))
        out = snap_peaks(record(x), peaks, "local_min", 50.0)
        assert out.peaks.tolist() == [100]

    def test_overlapping_windows_keep_order(self):
        # two peaks 260 ms apart (33 samples at 128 Hz); a 150 ms window
        # lets both see the same apex between them
        x = np.zeros(400)
        apex = 116
        x[apex] = 1.0
        peaks = PeakAnnotations(record_id="p", fs=FS, peaks=np.array([100, 133]))
        out = snap_peaks(record(x), peaks, "local_max", 150.0)
        assert out.peaks.tolist() == [apex, 133]
        assert np.all(np.diff(out.peaks) > 0)

    def test_version_unchanged(self):
        x = self.make_pulse()
        peaks = PeakAnnotations(record_id="p", fs=FS, peaks=np.array([97]), version=5)
        assert snap_peaks(record(x), peaks, "local_max", 50.0).version == 5


class TestEdits:
    def peaks(self, idx, version=0):
        return PeakAnnotations(record_id="p", fs=FS, peaks=np.asarray(idx), version=version)

    def test_empty_edit_bumps_version(self):
        out = apply_peak_edits(self.peaks([10, 20, 30], version=2))
        assert out.peaks.tolist() == [10, 20, 30]
        assert out.version == 3

    def test_remove_and_add(self):
        out = apply_peak_edits(self.peaks([10, 20, 30]), add=[22], remove=[20])
        assert out.peaks.tolist() == [10, 22, 30]
        assert out.version == 1

    def test_unknown_remove_target(self):
        with pytest.raises(UnknownPeak):
            apply_peak_edits(self.peaks([10]), remove=[15])

    def test_duplicate_add(self):
        with pytest.raises(DuplicatePeak):
            apply_peak_edits(self.peaks([10, 20]), add=[20])
        with pytest.raises(DuplicatePeak):
            apply_peak_edits(self.peaks([10]), add=[15, 15])

    def test_out_of_range_add(self):
        with pytest.raises(OutOfRange):
            apply_peak_edits(self.peaks([10]), add=[5000], n_samples=1000)
        with pytest.raises(OutOfRange):
            apply_peak_edits(self.peaks([10]), add=[-3])

    @settings(max_examples=150, deadline=None)
    @given(
        initial=st.sets(st.integers(min_value=0, max_value=999), min_size=1, max_size=60),
        removals=st.sets(st.integers(min_value=0, max_value=999), max_size=30),
        additions=st.sets(st.integers(min_value=0, max_value=999), max_size=30),
    )
    def test_random_edits_property(self, initial, removals, additions):
        peaks = self.peaks(sorted(initial))
        removals = removals & initial
        additions = additions - (initial - removals)
        out = apply_peak_edits(peaks, add=sorted(additions), remove=sorted(removals),
                               n_samples=1000)
        assert np.all(np.diff(out.peaks) > 0)
        assert set(out.peaks.tolist()) == (initial - removals) | additions
        assert out.version == peaks.version + 1


def test_detector_config_validation():
    with pytest.raises(ValueError):
        DetectorConfig(bandpass_low_hz=30.0, bandpass_high_hz=20.0)
    with pytest.raises(ValueError):
        DetectorConfig(threshold_fraction=1.2)
    with pytest.raises(ValueError):
        DetectorConfig(refractory_ms=0.0)
    with pytest.raises(ValueError):
        DetectorConfig(snap_mode="sideways")
