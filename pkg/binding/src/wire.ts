/**
 * Wire types for the engine's line-delimited JSON protocol.
 *
 * One request object per line on the child's stdin, one response object
 * per line on its stdout.  Protocol errors come back as
 * `{"error": {"type", "message"}}` and leave the server running;
 * anything that kills the pipe is a transport failure.
 */

export type ColorName = "black" | "blue" | "yellow";
export type ShapeName = "circle" | "square" | "triangle";
export type SizeName = "small" | "medium" | "large";
export type VariantName = "tower" | "scatter";

/** Action JSON exactly as the engine's codec accepts it. */
export type Action =
  | { type: "stop" }
  | { type: "tower_add"; box: number; color: ColorName }
  | { type: "tower_remove"; box: number }
  | { type: "scatter_add"; x: number; y: number; shape: ShapeName; color: ColorName; size: SizeName }
  | { type: "scatter_remove"; x: number; y: number }
  | { type: "grid_add"; col: number; row: number; shape: ShapeName; color: ColorName; size: SizeName }
  | { type: "grid_remove"; col: number; row: number };

export interface ResetRequest {
  cmd: "reset";
  mdp_id?: string;
  seed?: number;
  render?: boolean;
}

export interface StepRequest {
  cmd: "step";
  action: Action;
  render?: boolean;
}

export interface CloseRequest {
  cmd: "close";
}

export type Request = ResetRequest | StepRequest | CloseRequest;

export interface ScenePayload {
  variant: VariantName;
  fingerprint: string;
  objects: Array<{
    shape: ShapeName;
    color: ColorName;
    size: SizeName;
    x: number;
    y: number;
  }>;
}

/** Inline observation image: base64 raw RGB bytes, row-major. */
export interface ImageRef {
  encoding: "base64";
  shape: number[];
  data: string;
}

export interface EpisodeResponse {
  scene: ScenePayload;
  image_ref?: ImageRef;
  reward: number;
  done: boolean;
  termination: string;
}

export interface CloseResponse {
  ok: true;
}

export interface ErrorResponse {
  error: { type: string; message: string };
}

export type Response = EpisodeResponse | CloseResponse | ErrorResponse;

/** The engine answered with a diagnostic instead of an episode payload. */
export class EngineError extends Error {
  /** Engine-side error category (e.g. "unknown_mdp", "bad_action"). */
  readonly kind: string;

  constructor(kind: string, message: string) {
    super(message);
    this.name = "EngineError";
    this.kind = kind;
  }
}

/** The child process or its pipes failed; the handle is unusable. */
export class TransportError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "TransportError";
  }
}

export function isErrorResponse(r: Response): r is ErrorResponse {
  return typeof r === "object" && r !== null && "error" in r;
}
