/** Shared test scaffolding: a DOM, a WAV generator, and a gateway runner. */

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { Window } from "happy-dom";

import type { AudioPlayer } from "../src/audio.js";

export function installDom(): Window {
  const window = new Window({ url: "http://localhost/" });
  (globalThis as Record<string, unknown>).document = window.document;
  (globalThis as Record<string, unknown>).window = window;
  return window;
}

export async function waitFor(
  predicate: () => boolean,
  timeoutMs = 30_000,
  what = "condition",
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (predicate()) {
      return;
    }
    await new Promise((resolve) => setTimeout(resolve, 25));
  }
  throw new Error(`timed out waiting for ${what}`);
}

export function byTestId(root: { querySelector(sel: string): unknown }, id: string) {
  return root.querySelector(`[data-testid="${id}"]`) as unknown as HTMLElement | null;
}

/** Records every playback request and verifies the URL really serves WAV. */
export class RecordingPlayer implements AudioPlayer {
  played: string[] = [];
  payloads: Uint8Array[] = [];

  async play(url: string): Promise<void> {
    this.played.push(url);
    const response = await fetch(url);
    if (!response.ok) {
      throw new Error(`playback URL ${url} answered ${response.status}`);
    }
    this.payloads.push(new Uint8Array(await response.arrayBuffer()));
  }

  stop(): void {}
}

function midiFreq(midi: number): number {
  return 440 * Math.pow(2, (midi - 69) / 12);
}

/** Two triads over a click layer; enough for chord and beat analysis. */
export function makeQuizWav(): Uint8Array {
  const sr = 44100;
  const duration = 4.0;
  const n = Math.round(sr * duration);
  const samples = new Float64Array(n);

  const addChord = (midis: number[], startS: number, endS: number) => {
    const lo = Math.round(startS * sr);
    const hi = Math.round(endS * sr);
    for (const midi of midis) {
      const f = midiFreq(midi);
      for (let partial = 1; partial <= 3; partial++) {
        const amp = 0.08 * Math.pow(0.5, partial - 1);
        const w = 2 * Math.PI * partial * f;
        for (let i = lo; i < hi; i++) {
          samples[i]! += amp * Math.sin((w * (i - lo)) / sr);
        }
      }
    }
  };
  addChord([69, 72, 76], 0, 2); // A minor
  addChord([65, 69, 72], 2, 4); // F major

  const clickLen = Math.round(0.01 * sr);
  for (let t = 0.25; t + 0.011 < duration; t += 0.5) {
    const start = Math.round(t * sr);
    for (let i = 0; i < clickLen; i++) {
      samples[start + i]! += 0.35 * Math.sin((2 * Math.PI * 1000 * i) / sr);
    }
  }

  const bytes = new Uint8Array(44 + n * 2);
  const view = new DataView(bytes.buffer);
  const writeTag = (offset: number, tag: string) => {
    for (let i = 0; i < tag.length; i++) {
      bytes[offset + i] = tag.charCodeAt(i);
    }
  };
  writeTag(0, "RIFF");
  view.setUint32(4, 36 + n * 2, true);
  writeTag(8, "WAVE");
  writeTag(12, "fmt ");
  view.setUint32(16, 16, true);
  view.setUint16(20, 1, true);
  view.setUint16(22, 1, true);
  view.setUint32(24, sr, true);
  view.setUint32(28, sr * 2, true);
  view.setUint16(32, 2, true);
  view.setUint16(34, 16, true);
  writeTag(36, "data");
  view.setUint32(40, n * 2, true);
  for (let i = 0; i < n; i++) {
    const clamped = Math.max(-1, Math.min(1, samples[i]!));
    view.setInt16(44 + i * 2, Math.round(clamped * 32767), true);
  }
  return bytes;
}

export interface GatewayHandle {
  baseUrl: string;
  process: ChildProcess;
  stop(): Promise<void>;
}

export async function startGateway(): Promise<GatewayHandle> {
  const dataDir = mkdtempSync(join(tmpdir(), "etudeforge-e2e-"));
  const port = 18000 + Math.floor(Math.random() * 20000);
  const child = spawn(
    "python3",
    ["-m", "etudeforge.gateway.cli", "serve", "--port", String(port),
     "--data-dir", dataDir],
    { stdio: "ignore" },
  );
  const baseUrl = `http://127.0.0.1:${port}`;
  const deadline = Date.now() + 30_000;
  while (Date.now() < deadline) {
    if (child.exitCode !== null) {
      throw new Error(`gateway exited early with code ${child.exitCode}`);
    }
    try {
      const response = await fetch(`${baseUrl}/api/tracks`);
      if (response.ok) {
        return {
          baseUrl,
          process: child,
          stop: async () => {
            child.kill("SIGKILL");
            await new Promise((resolve) => child.once("exit", resolve));
          },
        };
      }
    } catch {
      await new Promise((resolve) => setTimeout(resolve, 150));
    }
  }
  child.kill("SIGKILL");
  throw new Error("gateway never came up");
}
