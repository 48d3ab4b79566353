/**
 * Wire protocol spoken with the live-play service.
 *
 * Every frame is one JSON document with a `type` field. Units: t in
 * seconds, x as normalized position, v in 1/s.
 */

export interface ConfigMessage {
  type: "config";
  t: number;
  mode: string;
  T: number;
  engine_version?: string;
  theta_p?: number;
  theta_sigma?: number;
  a?: number;
  b?: number;
  [key: string]: unknown;
}

export interface HpMessage {
  type: "hp";
  t: number;
  x: number;
}

export interface VpMessage {
  type: "vp";
  t: number;
  x: number;
  v: number;
  /** present on replay streams only */
  hp_x?: number;
}

export interface MetricsMessage {
  type: "metrics";
  t: number;
  rms: number;
  window: number;
  cv?: number;
  tl?: number;
}

export interface ErrorMessage {
  type: "error";
  t: number;
  message: string;
}

export type ServerMessage =
  | ConfigMessage
  | VpMessage
  | MetricsMessage
  | ErrorMessage;

/** Fields the client may put in its opening config frame. */
export interface ConfigRequest {
  mode?: string;
  T?: number;
  controller?: Record<string, number>;
  plant?: Record<string, number>;
  signature?: { samples: number[]; T_rec: number };
  alpha_f?: number;
  x0?: number;
  y0?: number;
  seed?: number;
}

export class ProtocolError extends Error {}

function requireFiniteNumber(doc: Record<string, unknown>, key: string): number {
  const value = doc[key];
  if (typeof value !== "number" || !Number.isFinite(value)) {
    throw new ProtocolError(`field '${key}' must be a finite number`);
  }
  return value;
}

/** Parse and validate one server frame; throws ProtocolError if bad. */
export function parseServerMessage(text: string): ServerMessage {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (exc) {
    throw new ProtocolError(`malformed frame: ${(exc as Error).message}`);
  }
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    throw new ProtocolError("frame must be a JSON object");
  }
  const record = doc as Record<string, unknown>;
  switch (record.type) {
    case "config": {
      requireFiniteNumber(record, "t");
      requireFiniteNumber(record, "T");
      if (typeof record.mode !== "string") {
        throw new ProtocolError("config frame needs a string 'mode'");
      }
      return record as unknown as ConfigMessage;
    }
    case "vp": {
      requireFiniteNumber(record, "t");
      requireFiniteNumber(record, "x");
      requireFiniteNumber(record, "v");
      return record as unknown as VpMessage;
    }
    case "metrics": {
      requireFiniteNumber(record, "t");
      requireFiniteNumber(record, "rms");
      return record as unknown as MetricsMessage;
    }
    case "error": {
      if (typeof record.message !== "string") {
        throw new ProtocolError("error frame needs a string 'message'");
      }
      return record as unknown as ErrorMessage;
    }
    default:
      throw new ProtocolError(`unknown frame type ${String(record.type)}`);
  }
}

export function serializeConfig(fields: ConfigRequest): string {
  return JSON.stringify({ type: "config", ...fields });
}

export function serializeHp(t: number, x: number): string {
  if (!Number.isFinite(t) || !Number.isFinite(x)) {
    throw new ProtocolError("hp fields must be finite");
  }
  return JSON.stringify({ type: "hp", t, x });
}
