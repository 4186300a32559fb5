import { describe, expect, it } from "vitest";

import { EnvHandle } from "../src/env.js";
import { readDataset } from "../src/dataset.js";
import type { Action, VariantName } from "../src/wire.js";
import {
  RawEngine,
  generateFixtures,
  makeRng,
  sampleAction,
  sha256,
} from "./helpers.js";

const TOTAL_EPISODES = 1000;
const MAX_ACTIONS = 12; // the step budget: no episode can outlive it
const IMAGE_BYTES = 100 * 380 * 3;

interface EpisodeTrace {
  /** One line per reset/step: image digest, reward, done, termination. */
  events: string[];
  ended: boolean;
  kinds: string[];
}

async function driveBinding(
  env: EnvHandle,
  id: string,
  seed: number,
  actions: Action[],
): Promise<EpisodeTrace> {
  const events: string[] = [];
  const kinds: string[] = [];
  const first = await env.reset(seed, id);
  if (first.image.length !== IMAGE_BYTES) {
    throw new Error(`reset image has ${first.image.length} bytes`);
  }
  events.push(`reset ${sha256(first.image)}`);
  let ended = false;
  for (const action of actions) {
    const r = await env.step(action);
    if (r.observation.image.length !== IMAGE_BYTES) {
      throw new Error(`step image has ${r.observation.image.length} bytes`);
    }
    const done = r.terminated || r.truncated;
    events.push(
      `step ${sha256(r.observation.image)} ${r.reward} ${done} ${r.info.termination}`,
    );
    if (done) {
      kinds.push(r.info.termination);
      ended = true;
      break;
    }
  }
  return { events, ended, kinds };
}

async function driveRaw(
  raw: RawEngine,
  id: string,
  seed: number,
  actions: Action[],
): Promise<EpisodeTrace> {
  const events: string[] = [];
  const kinds: string[] = [];
  const first = await raw.send({ cmd: "reset", mdp_id: id, seed, render: true });
  events.push(`reset ${sha256(Buffer.from(first.image_ref!.data, "base64"))}`);
  let ended = false;
  for (const action of actions) {
    const r = await raw.send({ cmd: "step", action, render: true });
    const image = Buffer.from(r.image_ref!.data, "base64");
    events.push(`step ${sha256(image)} ${r.reward} ${r.done} ${r.termination}`);
    if (r.done) {
      kinds.push(r.termination!);
      ended = true;
      break;
    }
  }
  return { events, ended, kinds };
}

describe("protocol conformance", () => {
  it(
    "matches direct stdio driving over 1000 seeded random episodes",
    async () => {
      const files = await generateFixtures(29, 12);
      const perFile = TOTAL_EPISODES / files.length;
      const kindsSeen = new Set<string>();
      let episode = 0;

      for (const file of files) {
        const variant: VariantName = file.includes("tower") ? "tower" : "scatter";
        const ids = [...readDataset(file).keys()].sort();
        const env = new EnvHandle({ dataset: file });
        const raw = new RawEngine(file);
        try {
          for (let k = 0; k < perFile; k++, episode++) {
            const id = ids[k % ids.length];
            const seed = 90_000 + episode;
            const rng = makeRng(0x9e3779b9 ^ episode);
            const actions = Array.from({ length: MAX_ACTIONS }, () =>
              sampleAction(rng, variant),
            );

            const mine = await driveBinding(env, id, seed, actions);
            const direct = await driveRaw(raw, id, seed, actions);

            expect(mine.events).toEqual(direct.events);
            expect(mine.ended).toBe(true);
            for (const kind of mine.kinds) kindsSeen.add(kind);
          }
        } finally {
          await env.close().catch(() => env.dispose());
          await raw.close().catch(() => undefined);
        }
      }

      expect(episode).toBe(TOTAL_EPISODES);
      // random play must have ended episodes in more than one way
      expect(kindsSeen.size).toBeGreaterThanOrEqual(3);
    },
    600_000,
  );
});
