/** DOM wiring for the peak editor. All analysis numbers shown here come from
 * server responses verbatim; the client only stages peak edits and renders. */

import { ApiClient, ApiError } from "./api.js";
import { SessionStore } from "./store.js";
import { buildTabs } from "./results.js";
import {
  Viewport,
  chunkExtent,
  nearestPeak,
  renderWaveform,
  snapToExtremum,
  xToSample,
} from "./waveform.js";
import type { SignalChunk } from "./types.js";

const api = new ApiClient("");
const store = new SessionStore(api);

const el = {
  fileInput: document.getElementById("file-input") as HTMLInputElement,
  fileKind: document.getElementById("file-kind") as HTMLSelectElement,
  fsInput: document.getElementById("fs-input") as HTMLInputElement,
  recordList: document.getElementById("record-list") as HTMLSelectElement,
  status: document.getElementById("status") as HTMLElement,
  canvas: document.getElementById("waveform") as HTMLCanvasElement,
  detectBtn: document.getElementById("detect-btn") as HTMLButtonElement,
  baselineChk: document.getElementById("baseline-chk") as HTMLInputElement,
  snapChk: document.getElementById("snap-chk") as HTMLInputElement,
  commitBtn: document.getElementById("commit-btn") as HTMLButtonElement,
  cancelBtn: document.getElementById("cancel-btn") as HTMLButtonElement,
  pendingInfo: document.getElementById("pending-info") as HTMLElement,
  editMode: document.getElementById("edit-mode") as HTMLSelectElement,
  planMode: document.getElementById("plan-mode") as HTMLSelectElement,
  planN: document.getElementById("plan-n") as HTMLInputElement,
  planM: document.getElementById("plan-m") as HTMLInputElement,
  outlierThreshold: document.getElementById("outlier-threshold") as HTMLInputElement,
  outlierAction: document.getElementById("outlier-action") as HTMLSelectElement,
  psdMethod: document.getElementById("psd-method") as HTMLSelectElement,
  analyzeBtn: document.getElementById("analyze-btn") as HTMLButtonElement,
  exportLink: document.getElementById("export-link") as HTMLAnchorElement,
  resultTabs: document.getElementById("result-tabs") as HTMLElement,
  resultTable: document.getElementById("result-table") as HTMLElement,
  ibiStats: document.getElementById("ibi-stats") as HTMLElement,
};

let currentChunk: SignalChunk | null = null;
let activeTab = 0;
let dragOrigin: { x: number; start: number } | null = null;

function setStatus(text: string, isError = false): void {
  el.status.textContent = text;
  el.status.className = isError ? "status error" : "status";
}

async function refreshRecordList(selected?: string): Promise<void> {
  const records = await api.listRecords();
  el.recordList.innerHTML = "";
  for (const record of records) {
    const option = document.createElement("option");
    option.value = record.record_id;
    option.textContent = `${record.record_id} (${record.kind})`;
    if (record.record_id === selected) option.selected = true;
    el.recordList.appendChild(option);
  }
}

async function openSelected(): Promise<void> {
  const id = el.recordList.value;
  if (!id) return;
  await store.open(id);
  el.exportLink.href = api.exportPeaksUrl(id);
  setStatus(
    store.readOnly
      ? `${id}: RRI record (read-only, no waveform)`
      : `${id}: ${store.totalSamples} samples at ${store.fs} Hz`,
  );
  await redraw();
}

async function redraw(): Promise<void> {
  if (store.readOnly || !store.recordId || store.totalSamples === 0) {
    const ctx = el.canvas.getContext("2d")!;
    ctx.clearRect(0, 0, el.canvas.width, el.canvas.height);
    return;
  }
  const maxPoints = Math.max(el.canvas.width, 100);
  currentChunk = await api.getSignal(
    store.recordId, store.visibleStart, store.visibleEnd, maxPoints,
  );
  const [yMin, yMax] = chunkExtent(currentChunk);
  const view: Viewport = {
    start: store.visibleStart,
    end: store.visibleEnd,
    width: el.canvas.width,
    height: el.canvas.height,
    yMin,
    yMax,
  };
  const chunk = currentChunk;
  const valueAt = (sample: number): number => {
    let best = 0;
    let bestDist = Infinity;
    chunk.indices.forEach((idx, i) => {
      const d = Math.abs(idx - sample);
      if (d < bestDist) {
        bestDist = d;
        best = chunk.values[i];
      }
    });
    return best;
  };
  renderWaveform(el.canvas.getContext("2d")!, view, {
    chunk,
    committedPeaks: store.peaks,
    stagedAdds: store.stagedAdds,
    stagedRemoves: store.stagedRemoves,
    peakValue: valueAt,
  });
}

function updatePendingInfo(): void {
  const adds = store.stagedAdds.length;
  const removes = store.stagedRemoves.length;
  el.pendingInfo.textContent =
    adds || removes ? `staged: +${adds} / -${removes} (uncommitted)` : "no staged edits";
  el.commitBtn.disabled = !store.hasPendingEdits();
  el.cancelBtn.disabled = !store.hasPendingEdits();
}

function renderResults(): void {
  const tabs = buildTabs(store.lastReports);
  el.resultTabs.innerHTML = "";
  tabs.forEach((tab, i) => {
    const button = document.createElement("button");
    button.textContent = tab.label;
    button.className = i === activeTab ? "tab active" : "tab";
    button.addEventListener("click", () => {
      activeTab = i;
      renderResults();
    });
    el.resultTabs.appendChild(button);
  });
  const tab = tabs[Math.min(activeTab, tabs.length - 1)];
  if (!tab) {
    el.resultTable.innerHTML = "";
    el.ibiStats.textContent = "";
    return;
  }
  const rows = tab.rows
    .map((row) => `<tr><td>${row.name}</td><td>${row.display}</td></tr>`)
    .join("");
  el.resultTable.innerHTML = `<table><tbody>${rows}</tbody></table>`;
  el.ibiStats.innerHTML = tab.ibiLines.map((line) => `<div>${line}</div>`).join("");
}

async function handleCanvasClick(event: MouseEvent): Promise<void> {
  if (store.readOnly || !currentChunk) return;
  const rect = el.canvas.getBoundingClientRect();
  const view: Viewport = {
    start: store.visibleStart,
    end: store.visibleEnd,
    width: el.canvas.width,
    height: el.canvas.height,
    yMin: 0,
    yMax: 1,
  };
  const sample = xToSample(event.clientX - rect.left, view);
  const tolerance = Math.max(3, (store.visibleEnd - store.visibleStart) / el.canvas.width * 6);

  if (el.editMode.value === "remove") {
    const peak = nearestPeak(store.effectivePeaks(), sample, tolerance);
    if (peak !== null) store.stageRemove(peak);
    else setStatus("no peak near that click", true);
    return;
  }
  let target = sample;
  if (el.snapChk.checked) {
    const halfWindow = Math.round(0.05 * store.fs);
    target = snapToExtremum(currentChunk, sample, halfWindow);
  }
  try {
    store.stageAdd(target);
  } catch (error) {
    setStatus(String(error), true);
  }
}

function wireEvents(): void {
  el.fileInput.addEventListener("change", async () => {
    const file = el.fileInput.files?.[0];
    if (!file) return;
    try {
      const kind = el.fileKind.value as "ecg" | "rri";
      const summary = await api.upload({
        filename: file.name,
        content: await file.text(),
        kind,
        fs: kind === "ecg" ? Number(el.fsInput.value) : undefined,
      });
      await refreshRecordList(summary.record_id);
      await openSelected();
    } catch (error) {
      setStatus(error instanceof ApiError ? `upload failed: ${error.message}` : String(error), true);
    }
  });

  el.recordList.addEventListener("change", () => void openSelected());

  el.detectBtn.addEventListener("click", async () => {
    try {
      const result = await api.detect(store.recordId, {
        baseline_remove: el.baselineChk.checked,
      });
      store.adoptDetection(result.peaks, result.version);
      setStatus(`detected ${result.peak_count} peaks (version ${result.version})`);
      await redraw();
    } catch (error) {
      setStatus(String(error), true);
    }
  });

  el.commitBtn.addEventListener("click", async () => {
    const outcome = await store.commit();
    if (outcome.committed) {
      setStatus(`edits committed (version ${store.version})`);
    } else if (outcome.conflict) {
      const c = outcome.conflict;
      setStatus(
        `version conflict: peaks reloaded at version ${c.serverVersion}; ` +
          `${c.keptAdds.length + c.keptRemoves.length} staged edit(s) kept for ` +
          `confirmation, ${c.droppedAdds.length + c.droppedRemoves.length} dropped`,
        true,
      );
    }
    await redraw();
  });

  el.cancelBtn.addEventListener("click", () => {
    store.cancelEdits();
    void redraw();
  });

  el.analyzeBtn.addEventListener("click", async () => {
    try {
      store.settings = {
        mode: el.planMode.value as typeof store.settings.mode,
        n: Number(el.planN.value),
        m: Number(el.planM.value),
        outlierThreshold: Number(el.outlierThreshold.value),
        outlierAction: el.outlierAction.value as typeof store.settings.outlierAction,
        psdMethod: el.psdMethod.value as typeof store.settings.psdMethod,
      };
      await store.analyze();
      activeTab = 0;
      setStatus(`analysis complete: ${store.lastReports.length} report(s)`);
    } catch (error) {
      setStatus(String(error), true);
    }
  });

  el.canvas.addEventListener("click", (event) => void handleCanvasClick(event));

  el.canvas.addEventListener("wheel", (event) => {
    if (store.readOnly) return;
    event.preventDefault();
    const rect = el.canvas.getBoundingClientRect();
    const view: Viewport = {
      start: store.visibleStart,
      end: store.visibleEnd,
      width: el.canvas.width,
      height: el.canvas.height,
      yMin: 0,
      yMax: 1,
    };
    const center = xToSample(event.clientX - rect.left, view);
    store.zoom(event.deltaY > 0 ? 1.25 : 0.8, center);
    void redraw();
  });

  el.canvas.addEventListener("mousedown", (event) => {
    dragOrigin = { x: event.clientX, start: store.visibleStart };
  });
  window.addEventListener("mouseup", () => {
    dragOrigin = null;
  });
  el.canvas.addEventListener("mousemove", (event) => {
    if (!dragOrigin) return;
    const samplesPerPixel = (store.visibleEnd - store.visibleStart) / el.canvas.width;
    const delta = Math.round((dragOrigin.x - event.clientX) * samplesPerPixel);
    store.setVisibleRange(dragOrigin.start + delta,
      dragOrigin.start + delta + (store.visibleEnd - store.visibleStart));
    void redraw();
  });
}

store.subscribe(() => {
  updatePendingInfo();
  renderResults();
});

wireEvents();
updatePendingInfo();
void refreshRecordList();
