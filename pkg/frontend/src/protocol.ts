/**
 * The engine's wire schema, verbatim. The relay bridges these messages
 * between the engine's TCP stream and the browser WebSocket without
 * renaming a single field.
 */

export type OptimizerName = "sgd" | "momentum" | "adadelta";

export interface ControlMessage {
  cmd: "configure" | "start" | "pause" | "resume" | "stop" | "set_hyper";
  id: number;
  key?: string;
  value?: unknown;
}

export interface AckMessage {
  ack: number;
  ok: boolean;
  reason?: string;
}

export interface StatsEvent {
  event: "stats";
  samples_seen: number;
  loss: number;
  train_acc: number;
  test_acc: number;
  per_class_f1: number[];
  lr: number;
  momentum: number;
  optimizer: string;
  seed: number;
}

export interface StateEvent {
  event: "state";
  state: "idle" | "running" | "paused" | "stopped";
  samples_seen: number;
  dropped_stats?: number;
}

export interface ErrorEvent {
  event: "error";
  reason: string;
}

export type EngineMessage = AckMessage | StatsEvent | StateEvent | ErrorEvent;

export function isStats(m: unknown): m is StatsEvent {
  return typeof m === "object" && m !== null && (m as StatsEvent).event === "stats";
}

export function isState(m: unknown): m is StateEvent {
  return typeof m === "object" && m !== null && (m as StateEvent).event === "state";
}

export function isErrorEvent(m: unknown): m is ErrorEvent {
  return typeof m === "object" && m !== null && (m as ErrorEvent).event === "error";
}

export function isAck(m: unknown): m is AckMessage {
  return typeof m === "object" && m !== null && typeof (m as AckMessage).ack === "number";
}

export function parseEngineLine(line: string): EngineMessage | null {
  let parsed: unknown;
  try {
    parsed = JSON.parse(line);
  } catch {
    return null;
  }
  if (isStats(parsed) || isState(parsed) || isErrorEvent(parsed) || isAck(parsed)) {
    return parsed;
  }
  return null;
}
