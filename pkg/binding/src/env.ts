import { EngineProcess, type EngineOptions } from "./engine.js";
import { readDataset, type MdpRecord } from "./dataset.js";
import {
  type Action,
  type EpisodeResponse,
  type ImageRef,
  TransportError,
} from "./wire.js";

/** Height, width, channels of every rendered observation. */
export const OBSERVATION_SHAPE: readonly [number, number, number] = [100, 380, 3];

/** Wire protocol generation this client speaks. */
export const PROTOCOL_VERSION = 1;

/**
 * What the agent sees after reset and after every step: the rendered
 * board plus the statement it is being asked to make true or false.
 */
export interface Observation {
  /** Raw RGB bytes, row-major, shape [100, 380, 3]. */
  image: Uint8Array;
  shape: readonly [number, number, number];
  statement: string;
  target: boolean;
}

export interface StepInfo {
  /** "stopped_success" | "stopped_failure" | "invalid_action" | "horizon" | "none" */
  termination: string;
  /** Canonical digest of the scene after the step. */
  fingerprint: string;
}

export interface StepResult {
  observation: Observation;
  reward: number;
  /** Episode ended by stopping or by an invalid action. */
  terminated: boolean;
  /** Episode ended by running out of steps. */
  truncated: boolean;
  info: StepInfo;
}

export interface EnvHandleOptions extends EngineOptions {
  /** MDP to reset into when reset() is not given an explicit id. */
  mdpId?: string;
}

const TERMINAL_KINDS = new Set([
  "stopped_success",
  "stopped_failure",
  "invalid_action",
]);

function actionFamily(action: Action): "tower" | "scatter" | "any" {
  switch (action.type) {
    case "stop":
      return "any";
    case "tower_add":
    case "tower_remove":
      return "tower";
    default:
      return "scatter";
  }
}

function decodeImage(ref: ImageRef | undefined): Uint8Array {
  if (ref === undefined) {
    throw new TransportError("engine response is missing the rendered image");
  }
  const bytes = Buffer.from(ref.data, "base64");
  const [h, w, c] = OBSERVATION_SHAPE;
  const sameShape =
    ref.shape.length === 3 &&
    ref.shape[0] === h &&
    ref.shape[1] === w &&
    ref.shape[2] === c;
  if (!sameShape || bytes.length !== h * w * c) {
    throw new TransportError(
      `engine rendered shape [${ref.shape.join(", ")}] (${bytes.length} bytes); ` +
        `expected [${OBSERVATION_SHAPE.join(", ")}]`,
    );
  }
  return new Uint8Array(bytes.buffer, bytes.byteOffset, bytes.length);
}

/**
 * Gym-style handle on one engine process.
 *
 * The handle owns a child process serving the MDPs of one dataset file
 * and exposes the usual episodic API: reset(seed) returns the first
 * observation, step(action) returns the five-field result, render()
 * replays the latest frame.  For parallel environments, open several
 * handles; each one keeps a single request in flight at a time.
 *
 * Engine-side problems (unknown MDP id, malformed action, stepping a
 * finished episode) reject with EngineError carrying the engine's own
 * diagnostic; a dead child rejects with TransportError.
 */
export class EnvHandle {
  /** Every MDP the child can serve, keyed by id. */
  readonly mdps: Map<string, MdpRecord>;
  readonly protocolVersion = PROTOCOL_VERSION;

  private readonly engine: EngineProcess;
  private readonly defaultId: string | undefined;
  private current: MdpRecord | null = null;
  private last: Observation | null = null;

  constructor(options: EnvHandleOptions) {
    this.mdps = readDataset(options.dataset);
    this.defaultId = options.mdpId;
    this.engine = new EngineProcess(options);
  }

  /** The most recent observation, or null before the first reset. */
  get lastObservation(): Observation | null {
    return this.last;
  }

  /** The MDP the live episode belongs to, or null before the first reset. */
  get currentMdp(): MdpRecord | null {
    return this.current;
  }

  /**
   * Start a new episode and return its first observation.
   *
   * Deterministic per seed: the same (mdp, seed) pair always yields the
   * same starting scene, hence the same image.
   */
  async reset(seed?: number, mdpId?: string): Promise<Observation> {
    const id = mdpId ?? this.defaultId;
    const response = (await this.engine.request({
      cmd: "reset",
      ...(id !== undefined ? { mdp_id: id } : {}),
      ...(seed !== undefined ? { seed } : {}),
      render: true,
    })) as EpisodeResponse;
    // the engine accepted the id, so the record must exist in the same file
    const record = id !== undefined ? this.mdps.get(id) : undefined;
    if (record === undefined) {
      throw new TransportError(
        `engine reset to ${id ?? "<default>"} but the dataset has no such record`,
      );
    }
    this.current = record;
    this.last = this.observe(response, record);
    return this.last;
  }

  /**
   * Apply one action to the live episode.
   *
   * terminated covers stopping (either verdict) and invalid actions;
   * truncated covers running out the step budget.  Rewards are the
   * engine's own values, untouched.
   */
  async step(action: Action): Promise<StepResult> {
    const record = this.current;
    if (record === null) {
      throw new Error("no episode: call reset() before step()");
    }
    const family = actionFamily(action);
    if (family !== "any" && family !== record.variant) {
      throw new TypeError(
        `${action.type} does not apply to a ${record.variant} environment`,
      );
    }
    const response = (await this.engine.request({
      cmd: "step",
      action,
      render: true,
    })) as EpisodeResponse;
    this.last = this.observe(response, record);
    return {
      observation: this.last,
      reward: response.reward,
      terminated: TERMINAL_KINDS.has(response.termination),
      truncated: response.termination === "horizon",
      info: {
        termination: response.termination,
        fingerprint: response.scene.fingerprint,
      },
    };
  }

  /** The latest rendered frame (same bytes the last reset/step returned). */
  render(): Uint8Array {
    if (this.last === null) {
      throw new Error("nothing to render: call reset() first");
    }
    return this.last.image;
  }

  /** Shut the engine down cleanly. */
  async close(): Promise<void> {
    await this.engine.close();
  }

  /** Kill the engine without the goodbye handshake. */
  dispose(): void {
    this.engine.dispose();
  }

  private observe(response: EpisodeResponse, record: MdpRecord): Observation {
    return {
      image: decodeImage(response.image_ref),
      shape: OBSERVATION_SHAPE,
      statement: record.statement,
      target: record.target,
    };
  }
}
