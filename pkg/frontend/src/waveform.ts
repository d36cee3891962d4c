/** Waveform pane: coordinate math, hit-testing, click snapping, rendering.
 * The math is pure so it can be unit-tested without a canvas. */

import type { SignalChunk } from "./types.js";

export interface Viewport {
  start: number;
  end: number;
  width: number;
  height: number;
  yMin: number;
  yMax: number;
}

export function sampleToX(sample: number, view: Viewport): number {
  return ((sample - view.start) / (view.end - view.start)) * view.width;
}

export function xToSample(x: number, view: Viewport): number {
  return Math.round(view.start + (x / view.width) * (view.end - view.start));
}

export function valueToY(value: number, view: Viewport): number {
  const span = view.yMax - view.yMin || 1;
  return view.height - ((value - view.yMin) / span) * view.height;
}

/** Find the annotated peak nearest to a clicked sample, within tolerance. */
export function nearestPeak(
  peaks: number[],
  sample: number,
  tolSamples: number,
): number | null {
  let best: number | null = null;
  let bestDist = tolSamples + 1;
  for (const p of peaks) {
    const d = Math.abs(p - sample);
    if (d < bestDist) {
      best = p;
      bestDist = d;
    }
  }
  return bestDist <= tolSamples ? best : null;
}

/** Snap a clicked sample to the nearest local extremum of the fetched window
 * within +- halfWindow samples; returns the click itself when the window has
 * no interior extremum there. */
export function snapToExtremum(
  chunk: Pick<SignalChunk, "indices" | "values">,
  target: number,
  halfWindow: number,
): number {
  const { indices, values } = chunk;
  let best: number | null = null;
  let bestDist = Infinity;
  for (let i = 1; i + 1 < indices.length; i++) {
    if (Math.abs(indices[i] - target) > halfWindow) continue;
    const isMax = values[i] >= values[i - 1] && values[i] >= values[i + 1];
    const isMin = values[i] <= values[i - 1] && values[i] <= values[i + 1];
    if (!isMax && !isMin) continue;
    const d = Math.abs(indices[i] - target);
    if (d < bestDist) {
      best = indices[i];
      bestDist = d;
    }
  }
  return best ?? target;
}

export function chunkExtent(chunk: Pick<SignalChunk, "values">): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of chunk.values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!isFinite(lo)) return [-1, 1];
  const pad = (hi - lo || 1) * 0.08;
  return [lo - pad, hi + pad];
}

export interface RenderState {
  chunk: SignalChunk;
  committedPeaks: number[];
  stagedAdds: number[];
  stagedRemoves: number[];
  peakValue: (sample: number) => number;
}

const COLORS = {
  trace: "#2b6cb0",
  peak: "#e53e3e",
  stagedAdd: "#38a169",
  stagedRemove: "#a0aec0",
  grid: "#e2e8f0",
};

export function renderWaveform(
  ctx: CanvasRenderingContext2D,
  view: Viewport,
  state: RenderState,
): void {
  ctx.clearRect(0, 0, view.width, view.height);

  ctx.strokeStyle = COLORS.grid;
  ctx.lineWidth = 1;
  const second = view.start % 1;
  void second;
  ctx.beginPath();
  for (let x = 0; x <= view.width; x += view.width / 10) {
    ctx.moveTo(x, 0);
    ctx.lineTo(x, view.height);
  }
  ctx.stroke();

  ctx.strokeStyle = COLORS.trace;
  ctx.lineWidth = 1.2;
  ctx.beginPath();
  state.chunk.indices.forEach((sample, i) => {
    const x = sampleToX(sample, view);
    const y = valueToY(state.chunk.values[i], view);
    if (i === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  });
  ctx.stroke();

  const removed = new Set(state.stagedRemoves);
  for (const peak of state.committedPeaks) {
    if (peak < view.start || peak >= view.end) continue;
    drawMarker(ctx, view, peak, state.peakValue(peak),
      removed.has(peak) ? COLORS.stagedRemove : COLORS.peak,
      removed.has(peak));
  }
  for (const peak of state.stagedAdds) {
    if (peak < view.start || peak >= view.end) continue;
    drawMarker(ctx, view, peak, state.peakValue(peak), COLORS.stagedAdd, false);
  }
}

function drawMarker(
  ctx: CanvasRenderingContext2D,
  view: Viewport,
  sample: number,
  value: number,
  color: string,
  struck: boolean,
): void {
  const x = sampleToX(sample, view);
  const y = valueToY(value, view);
  ctx.fillStyle = color;
  ctx.beginPath();
  ctx.arc(x, y, 4, 0, 2 * Math.PI);
  ctx.fill();
  if (struck) {
    ctx.strokeStyle = color;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    ctx.moveTo(x - 6, y - 6);
    ctx.lineTo(x + 6, y + 6);
    ctx.stroke();
  }
}
