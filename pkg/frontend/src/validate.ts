/**
 * Client-side range rules, mirroring the engine's validation so obviously
 * bad values never leave the form.
 */

import type { OptimizerName } from "./protocol.js";

export const OPTIMIZERS: OptimizerName[] = ["sgd", "momentum", "adadelta"];

export interface ValidationResult {
  ok: boolean;
  reason?: string;
}

export function validateHyper(key: string, value: unknown): ValidationResult {
  switch (key) {
    case "lr": {
      const v = Number(value);
      if (!Number.isFinite(v) || v <= 0) return { ok: false, reason: "lr must be > 0" };
      return { ok: true };
    }
    case "momentum": {
      const v = Number(value);
      if (!Number.isFinite(v) || v < 0 || v >= 1)
        return { ok: false, reason: "momentum must be in [0, 1)" };
      return { ok: true };
    }
    case "dropout_rate": {
      const v = Number(value);
      if (!Number.isFinite(v) || v < 0 || v >= 1)
        return { ok: false, reason: "dropout rate must be in [0, 1)" };
      return { ok: true };
    }
    case "optimizer": {
      if (!OPTIMIZERS.includes(value as OptimizerName))
        return { ok: false, reason: `optimizer must be one of ${OPTIMIZERS.join(", ")}` };
      return { ok: true };
    }
    default:
      return { ok: false, reason: `unknown hyperparameter '${key}'` };
  }
}

export function validateSeed(value: unknown, started: boolean): ValidationResult {
  if (started) return { ok: false, reason: "seed is fixed once the run has started" };
  const v = Number(value);
  if (!Number.isInteger(v) || v < 0) return { ok: false, reason: "seed must be a non-negative integer" };
  return { ok: true };
}
