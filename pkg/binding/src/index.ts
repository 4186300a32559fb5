export {
  EnvHandle,
  OBSERVATION_SHAPE,
  PROTOCOL_VERSION,
  type EnvHandleOptions,
  type Observation,
  type StepInfo,
  type StepResult,
} from "./env.js";
export { EngineProcess, type EngineOptions } from "./engine.js";
export { readDataset, type MdpRecord } from "./dataset.js";
export {
  EngineError,
  TransportError,
  isErrorResponse,
  type Action,
  type CloseRequest,
  type CloseResponse,
  type ColorName,
  type EpisodeResponse,
  type ErrorResponse,
  type ImageRef,
  type Request,
  type ResetRequest,
  type Response,
  type ScenePayload,
  type ShapeName,
  type SizeName,
  type StepRequest,
  type VariantName,
} from "./wire.js";
