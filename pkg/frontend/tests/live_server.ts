/** Spawns the real review server (uvicorn) for end-to-end tests. */

import { spawn, type ChildProcess } from "node:child_process";

export interface LiveServer {
  baseUrl: string;
  stop: () => void;
}

export async function startServer(): Promise<LiveServer> {
  const port = 8900 + Math.floor(Math.random() * 900);
  const proc: ChildProcess = spawn(
    "python3",
    [
      "-m", "uvicorn", "--factory", "hrnv.server:create_app",
      "--host", "127.0.0.1", "--port", String(port), "--log-level", "warning",
    ],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  let stderr = "";
  proc.stderr?.on("data", (chunk) => {
    stderr += String(chunk);
  });
  const baseUrl = `http://127.0.0.1:${port}`;

  for (let attempt = 0; attempt < 150; attempt++) {
    if (proc.exitCode !== null) break;
    try {
      const response = await fetch(`${baseUrl}/api/records`);
      if (response.ok) {
        return { baseUrl, stop: () => proc.kill("SIGTERM") };
      }
    } catch {
      /* not up yet */
    }
    await new Promise((resolve) => setTimeout(resolve, 100));
  }
  proc.kill("SIGTERM");
  throw new Error(`review server failed to start on ${baseUrl}\n${stderr}`);
}

/** Gaussian-template ECG train, one column per line (the upload format). */
export function syntheticEcgText(durationS: number, fs: number, hrBpm: number): string {
  const waves: Array<[number, number, number]> = [
    [0.12, -180, 25],
    [-0.12, -40, 9],
    [1.0, 0, 11],
    [-0.18, 40, 9],
    [0.35, 230, 55],
  ];
  const n = Math.round(durationS * fs);
  const x = new Float64Array(n);
  let t = 0.5;
  const rrBase = 60 / hrBpm;
  while (true) {
    const idx = Math.round(t * fs);
    if (idx >= n - Math.round(0.35 * fs)) break;
    for (const [amp, offsetMs, sigmaMs] of waves) {
      const center = idx + (offsetMs * fs) / 1000;
      const sigma = (sigmaMs * fs) / 1000;
      const lo = Math.max(0, Math.floor(center - 4 * sigma));
      const hi = Math.min(n, Math.ceil(center + 4 * sigma) + 1);
      for (let i = lo; i < hi; i++) {
        x[i] += amp * Math.exp(-0.5 * ((i - center) / sigma) ** 2);
      }
    }
    t += rrBase * (1 + 0.03 * Math.sin(2 * Math.PI * 0.1 * t));
  }
  return Array.from(x, (v) => v.toFixed(6)).join("\n") + "\n";
}
