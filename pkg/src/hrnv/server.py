"""Local HTTP service backing the interactive peak editor.

Records live in memory; peak edits use optimistic concurrency (every edit
names the version it was based on and conflicts are surfaced, never merged).
Waveforms are served min-max decimated so no QRS apex is visually lost at
any zoom level.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Literal, Optional

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel, Field

from .core import EcgRecord, IbiSeries, PeakAnnotations, ibi_from_peaks
from .errors import HrnvError, NotFound, VersionConflict
from .freq_domain import FreqConfig
from .io_formats import InputDescriptor, signal_from_text
from .nonlinear import DfaConfig, EntropyConfig
from .pipeline import analyze_ibi
from .preprocess import PreprocessConfig
from .qrs import DetectorConfig, apply_peak_edits, detect_r_peaks, remove_baseline

_UNIT_NAMES = {"s": "seconds", "ms": "milliseconds"}
_CACHE_LIMIT = 8


@dataclass
class SessionRecord:
    record_id: str
    signal: Optional[EcgRecord] = None
    ibi: Optional[IbiSeries] = None
    peaks: Optional[PeakAnnotations] = None
    reports_cache: dict = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def kind(self) -> str:
        return "ecg" if self.signal is not None else "rri"

    def summary(self) -> dict:
        return {
            "record_id": self.record_id,
            "kind": self.kind,
            "fs": self.signal.fs if self.signal else None,
            "n_samples": len(self.signal.samples) if self.signal else None,
            "n_intervals": len(self.ibi) if self.ibi is not None else None,
            "peak_count": len(self.peaks) if self.peaks is not None else None,
            "version": self.peaks.version if self.peaks is not None else None,
        }


class UploadBody(BaseModel):
    filename: str
    content: str
    kind: Literal["ecg", "rri"] = "ecg"
    fs: Optional[float] = None
    unit: Literal["s", "ms"] = "s"
    prefix: str = ""
    postfix: str = ""


class DetectBody(BaseModel):
    baseline_remove: bool = False
    segment: Optional[tuple[int, int]] = None
    bandpass_low_hz: float = 5.0
    bandpass_high_hz: float = 25.0
    integration_window_ms: float = 150.0
    refractory_ms: float = 250.0
    threshold_fraction: float = Field(default=0.3, gt=0, lt=1)
    searchback_factor: float = 1.5
    snap_window_ms: float = 50.0
    snap_mode: Literal["none", "local_max", "local_min", "auto"] = "auto"


class EditBody(BaseModel):
    add: list[int] = Field(default_factory=list)
    remove: list[int] = Field(default_factory=list)
    expected_version: int


class AnalyzeBody(BaseModel):
    mode: Literal["single", "m_equals_n", "all"] = "single"
    n: int = Field(default=1, ge=1)
    m: Optional[int] = Field(default=1, ge=1)
    outlier_threshold: float = Field(default=0.20, gt=0, lt=1)
    outlier_action: Literal["remove", "spline", "pchip", "linear"] = "remove"
    psd_method: Literal["lomb", "welch", "fft", "burg"] = "lomb"
    entropy_embedding: int = Field(default=2, ge=1)
    entropy_tolerance: float = Field(default=0.15, gt=0)


def create_app(static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="hrnv review server")
    records: dict[str, SessionRecord] = {}
    registry_lock = threading.Lock()

    def get_record(record_id: str) -> SessionRecord:
        try:
            return records[record_id]
        except KeyError:
            raise HTTPException(status_code=404, detail=f"no record {record_id!r}") from None

    @app.exception_handler(HrnvError)
    def _hrnv_error(_, exc: HrnvError):
        from fastapi.responses import JSONResponse

        status = 404 if isinstance(exc, NotFound) else 422
        if isinstance(exc, VersionConflict):
            return JSONResponse(
                status_code=409,
                content={"detail": str(exc), "current_version": exc.current},
            )
        return JSONResponse(status_code=status, content={"detail": str(exc)})

    @app.get("/api/records")
    def list_records():
        return {"records": [rec.summary() for rec in records.values()]}

    @app.post("/api/records")
    def upload(body: UploadBody):
        desc = InputDescriptor(
            path=body.filename,
            kind=body.kind,
            fs=body.fs,
            rri_unit=_UNIT_NAMES[body.unit],
            prefix=body.prefix,
            postfix=body.postfix,
        )
        loaded = signal_from_text(desc, body.content)
        if isinstance(loaded, EcgRecord):
            session = SessionRecord(
                record_id=loaded.record_id,
                signal=loaded,
                peaks=PeakAnnotations(record_id=loaded.record_id, fs=loaded.fs, peaks=[]),
            )
        else:
            session = SessionRecord(record_id=loaded.record_id, ibi=loaded)
        with registry_lock:
            records[session.record_id] = session
        return session.summary()

    @app.get("/api/records/{record_id}")
    def detail(record_id: str):
        return get_record(record_id).summary()

    @app.get("/api/records/{record_id}/signal")
    def signal(record_id: str, start: int = 0, end: Optional[int] = None,
               max_points: int = 2000):
        rec = get_record(record_id)
        if rec.signal is None:
            raise HTTPException(status_code=422, detail="record has no waveform (RRI input)")
        samples = rec.signal.samples
        end = len(samples) if end is None else end
        if not (0 <= start < end <= len(samples)):
            raise HTTPException(status_code=422, detail=f"bad range {start}:{end}")
        if max_points < 2:
            raise HTTPException(status_code=422, detail="max_points must be >= 2")
        indices, values, decimated = _decimate(samples, start, end, max_points)
        return {
            "record_id": record_id,
            "start": start,
            "end": end,
            "total_samples": len(samples),
            "fs": rec.signal.fs,
            "decimated": decimated,
            "indices": indices,
            "values": values,
        }

    @app.post("/api/records/{record_id}/detect")
    def detect(record_id: str, body: DetectBody):
        rec = get_record(record_id)
        if rec.signal is None:
            raise HTTPException(status_code=422, detail="record has no waveform (RRI input)")
        cfg = DetectorConfig(
            bandpass_low_hz=body.bandpass_low_hz,
            bandpass_high_hz=body.bandpass_high_hz,
            integration_window_ms=body.integration_window_ms,
            refractory_ms=body.refractory_ms,
            threshold_fraction=body.threshold_fraction,
            searchback_factor=body.searchback_factor,
            snap_window_ms=body.snap_window_ms,
            snap_mode=body.snap_mode,
        )
        with rec.lock:
            signal = rec.signal
            if body.segment is not None:
                signal = replace(signal, segment=(body.segment[0], body.segment[1]))
            if body.baseline_remove:
                # the denoised trace is what the review plot should show
                signal = remove_baseline(signal)
            detected = detect_r_peaks(signal, cfg)
            old_version = rec.peaks.version if rec.peaks is not None else -1
            rec.signal = signal
            rec.peaks = replace(detected, version=old_version + 1)
            rec.reports_cache.clear()
            return {
                "record_id": record_id,
                "peak_count": len(rec.peaks),
                "version": rec.peaks.version,
                "peaks": rec.peaks.peaks.tolist(),
            }

    @app.get("/api/records/{record_id}/peaks")
    def get_peaks(record_id: str):
        rec = get_record(record_id)
        if rec.peaks is None:
            raise HTTPException(status_code=422, detail="record has no peak annotations")
        return {
            "record_id": record_id,
            "fs": rec.peaks.fs,
            "version": rec.peaks.version,
            "peaks": rec.peaks.peaks.tolist(),
        }

    @app.patch("/api/records/{record_id}/peaks")
    def edit_peaks(record_id: str, body: EditBody):
        rec = get_record(record_id)
        if rec.peaks is None:
            raise HTTPException(status_code=422, detail="record has no peak annotations")
        with rec.lock:
            if body.expected_version != rec.peaks.version:
                raise VersionConflict(body.expected_version, rec.peaks.version)
            rec.peaks = apply_peak_edits(
                rec.peaks,
                add=body.add,
                remove=body.remove,
                n_samples=len(rec.signal.samples) if rec.signal is not None else None,
            )
            return {
                "record_id": record_id,
                "version": rec.peaks.version,
                "peak_count": len(rec.peaks),
                "peaks": rec.peaks.peaks.tolist(),
            }

    @app.post("/api/records/{record_id}/analyze")
    def run_analysis(record_id: str, body: AnalyzeBody):
        rec = get_record(record_id)
        with rec.lock:
            peaks = rec.peaks
            ibi = rec.ibi
        if ibi is None:
            if peaks is None or len(peaks) < 2:
                raise HTTPException(
                    status_code=422, detail="record needs at least 2 peaks to analyze"
                )
            ibi = ibi_from_peaks(peaks)
        cache_key = (
            peaks.version if peaks is not None else -1,
            json.dumps(body.model_dump(), sort_keys=True),
        )
        if cache_key not in rec.reports_cache:
            reports = analyze_ibi(
                ibi,
                plan_mode=body.mode,
                n=body.n,
                m=body.m,
                preprocess_cfg=PreprocessConfig(
                    threshold=body.outlier_threshold, action=body.outlier_action
                ),
                freq_cfg=FreqConfig(method=body.psd_method),
                entropy_cfg=EntropyConfig(
                    embedding=body.entropy_embedding,
                    tolerance_factor=body.entropy_tolerance,
                ),
                dfa_cfg=DfaConfig(),
            )
            if len(rec.reports_cache) >= _CACHE_LIMIT:
                rec.reports_cache.clear()
            rec.reports_cache[cache_key] = [r.to_dict() for r in reports]
        return {"record_id": record_id, "reports": rec.reports_cache[cache_key]}

    @app.get("/api/records/{record_id}/export/peaks")
    def export_peaks(record_id: str):
        rec = get_record(record_id)
        if rec.peaks is None:
            raise HTTPException(status_code=422, detail="record has no peak annotations")
        lines = [f"# record={rec.peaks.record_id}", f"# fs_hz={rec.peaks.fs!r}"]
        if rec.signal is not None and rec.signal.segment is not None:
            lines.append(f"# segment={rec.signal.segment[0]}:{rec.signal.segment[1]}")
        lines.extend(str(int(p)) for p in rec.peaks.peaks)
        return PlainTextResponse(
            "\n".join(lines) + "\n",
            media_type="text/plain",
            headers={"Content-Disposition": f'attachment; filename="{record_id}.peaks.csv"'},
        )

    if static_dir and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def _decimate(samples: np.ndarray, start: int, end: int, max_points: int):
    """Min-max bucket decimation preserving every bucket's extremum pair.

    Returns raw samples when the range already fits in max_points; otherwise
    at most 2 * max_points (index, value) points whose min/max equal the
    exact min/max of the range.
    """
    window = samples[start:end]
    if len(window) <= max_points:
        return list(range(start, end)), [float(v) for v in window], False

    edges = np.linspace(0, len(window), max_points + 1).astype(int)
    indices: list[int] = []
    values: list[float] = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        lo, hi = int(lo), int(hi)
        if lo >= hi:
            continue
        bucket = window[lo:hi]
        i_min = lo + int(np.argmin(bucket))
        i_max = lo + int(np.argmax(bucket))
        for i in sorted({i_min, i_max}):
            indices.append(start + i)
            values.append(float(window[i]))
    return indices, values, True
