import { execFile, spawn, type ChildProcessByStdio } from "node:child_process";
import type { Readable, Writable } from "node:stream";
import { createHash } from "node:crypto";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { createInterface, type Interface } from "node:readline";
import { promisify } from "node:util";

import type { Action, ColorName, ShapeName, SizeName, VariantName } from "../src/wire.js";

const execFileAsync = promisify(execFile);

export const PYTHON = "python3";

/** Generate the four fixture dataset files into a fresh temp directory. */
export async function generateFixtures(seed: number, count: number): Promise<string[]> {
  const dir = mkdtempSync(join(tmpdir(), "tribox-binding-"));
  const { stdout } = await execFileAsync(PYTHON, [
    "-m", "tribox.cli", "generate",
    "--seed", String(seed), "--count", String(count), "--out", dir,
  ]);
  return (JSON.parse(stdout) as { files: string[] }).files;
}

/** Ask the engine's scripted solver for a plan, as ready-to-send actions. */
export async function solvePlan(dataset: string, id: string): Promise<Action[]> {
  const { stdout } = await execFileAsync(PYTHON, [
    "-m", "tribox.cli", "solve", "--dataset", dataset, "--id", id,
  ]);
  const plans = (JSON.parse(stdout) as { plans: Action[][] }).plans;
  return plans[0];
}

/** Raw RGB bytes of the engine's own render of an empty scene. */
export async function renderEmptyScene(variant: VariantName): Promise<Buffer> {
  const script = [
    "import base64, sys",
    "from tribox import render",
    "from tribox.scene import Scene, Variant",
    `scene = Scene(Variant(${JSON.stringify(variant)}), ())`,
    "sys.stdout.write(base64.b64encode(render(scene).tobytes()).decode())",
  ].join("\n");
  const { stdout } = await execFileAsync(PYTHON, ["-c", script]);
  return Buffer.from(stdout.trim(), "base64");
}

export function sha256(bytes: Uint8Array): string {
  return createHash("sha256").update(bytes).digest("hex");
}

// --- deterministic random actions -----------------------------------------

/** mulberry32: tiny seeded PRNG, good enough for scripted action draws. */
export function makeRng(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

const COLORS: ColorName[] = ["black", "blue", "yellow"];
const SHAPES: ShapeName[] = ["circle", "square", "triangle"];
const SIZES: SizeName[] = ["small", "medium", "large"];

function pick<T>(rng: () => number, items: T[]): T {
  return items[Math.floor(rng() * items.length)];
}

/**
 * One in-domain action for the given variant.  Mildly biased toward adds
 * so episodes sometimes run long; stop is drawn often enough that every
 * ending kind shows up across a big batch.
 */
export function sampleAction(rng: () => number, variant: VariantName): Action {
  const roll = rng();
  if (roll < 0.15) {
    return { type: "stop" };
  }
  if (variant === "tower") {
    const box = Math.floor(rng() * 3);
    if (roll < 0.65) {
      return { type: "tower_add", box, color: pick(rng, COLORS) };
    }
    return { type: "tower_remove", box };
  }
  const col = Math.floor(rng() * 19);
  const row = Math.floor(rng() * 5);
  if (roll < 0.65) {
    return {
      type: "grid_add", col, row,
      shape: pick(rng, SHAPES), color: pick(rng, COLORS), size: pick(rng, SIZES),
    };
  }
  return { type: "grid_remove", col, row };
}

// --- direct protocol driving ----------------------------------------------

interface RawResponse {
  scene?: { fingerprint: string };
  image_ref?: { data: string; shape: number[] };
  reward?: number;
  done?: boolean;
  termination?: string;
  ok?: boolean;
  error?: { type: string; message: string };
}

/**
 * Bare-hands protocol client: same child command the binding spawns, but
 * none of the binding's code — just lines in, lines out.  The conformance
 * check compares the binding's stream against this.
 */
export class RawEngine {
  private child: ChildProcessByStdio<Writable, Readable, null>;
  private lines: Interface;
  private waiters: Array<(line: string) => void> = [];

  constructor(dataset: string) {
    this.child = spawn(PYTHON, ["-m", "tribox.cli", "step", "--mdp", dataset], {
      stdio: ["pipe", "pipe", "inherit"],
    });
    this.lines = createInterface({ input: this.child.stdout });
    this.lines.on("line", (line) => {
      const waiter = this.waiters.shift();
      if (waiter) waiter(line);
    });
  }

  send(request: object): Promise<RawResponse> {
    return new Promise((resolve, reject) => {
      this.waiters.push((line) => {
        const parsed = JSON.parse(line) as RawResponse;
        if (parsed.error) {
          reject(new Error(`${parsed.error.type}: ${parsed.error.message}`));
        } else {
          resolve(parsed);
        }
      });
      this.child.stdin.write(JSON.stringify(request) + "\n");
    });
  }

  async close(): Promise<void> {
    await this.send({ cmd: "close" });
    this.child.stdin.end();
    if (this.child.exitCode === null) {
      await new Promise<void>((resolve) => this.child.once("exit", () => resolve()));
    }
  }
}
