/**
 * SessionView: everything the dashboard knows about the engine, fed only
 * by engine messages. The UI never mutates training state directly; it
 * sends control messages and updates itself from acks and stats echoes.
 *
 * Chart buffers are keyed and ordered by samples_seen, so replaying a
 * stream after a reconnect cannot duplicate x-values. Displayed
 * hyperparameters come exclusively from stats-event echoes.
 */

import { decimate } from "./decimate.js";
import {
  ControlMessage,
  EngineMessage,
  isAck,
  isErrorEvent,
  isState,
  isStats,
  StatsEvent,
} from "./protocol.js";

export interface ChartPoint {
  samples_seen: number;
  loss: number;
  train_acc: number;
  test_acc: number;
}

export interface Annotation {
  samples_seen: number;
  label: string; // e.g. "lr=0.05"
}

export interface PendingCommand {
  id: number;
  cmd: string;
  key?: string;
  value?: unknown;
  sentAt: number;
}

export interface Warning {
  at: number;
  text: string;
}

export type ConnectionState = "disconnected" | "connecting" | "connected";

export interface EchoedHypers {
  lr: number | null;
  momentum: number | null;
  optimizer: string | null;
  seed: number | null;
}

const BUFFER_CAP = 20_000; // raw points kept; charts decimate to 2000

export class SessionView {
  connection: ConnectionState = "disconnected";
  engineState: "idle" | "running" | "paused" | "stopped" | "unknown" = "unknown";
  points: ChartPoint[] = [];
  f1Snapshot: number[] = new Array(10).fill(0);
  annotations: Annotation[] = [];
  pending = new Map<number, PendingCommand>();
  warnings: Warning[] = [];
  hypers: EchoedHypers = { lr: null, momentum: null, optimizer: null, seed: null };
  lastAcked = new Map<string, unknown>(); // last-acked hyper per key
  droppedStats = 0;
  started = false;

  private nextId = 1;
  private sender: ((msg: ControlMessage) => void) | null = null;
  private readonly timeoutMs: number;

  constructor(timeoutMs = 5000) {
    this.timeoutMs = timeoutMs;
  }

  /** Wire up the outgoing channel (called by the transport layer). */
  attach(sender: (msg: ControlMessage) => void): void {
    this.sender = sender;
    this.connection = "connected";
  }

  detach(): void {
    this.sender = null;
    this.connection = "disconnected";
    // in-flight commands can never resolve on a dead socket
    for (const p of this.pending.values()) {
      this.warnings.push({ at: p.sentAt, text: `${p.cmd} ${p.key ?? ""} unresolved: disconnected` });
    }
    this.pending.clear();
  }

  get lastSample(): number {
    return this.points.length ? this.points[this.points.length - 1].samples_seen : 0;
  }

  /** Feed one engine message; returns true if anything changed. */
  ingest(msg: EngineMessage, now = Date.now()): boolean {
    if (isStats(msg)) return this.ingestStats(msg);
    if (isState(msg)) {
      this.engineState = msg.state;
      if (msg.state === "running") this.started = true;
      if (typeof msg.dropped_stats === "number") this.droppedStats = msg.dropped_stats;
      return true;
    }
    if (isErrorEvent(msg)) {
      this.warnings.push({ at: now, text: msg.reason });
      return true;
    }
    if (isAck(msg)) return this.ingestAck(msg.ack, msg.ok, msg.reason, now);
    return false;
  }

  private ingestStats(s: StatsEvent): boolean {
    // replayed/duplicate x-values (reconnect snapshots) are dropped so
    // buffers stay strictly increasing in samples_seen
    if (this.points.length && s.samples_seen <= this.lastSample) return false;
    this.points.push({
      samples_seen: s.samples_seen,
      loss: s.loss,
      train_acc: s.train_acc,
      test_acc: s.test_acc,
    });
    if (this.points.length > BUFFER_CAP) this.points.splice(0, this.points.length - BUFFER_CAP);
    this.f1Snapshot = [...s.per_class_f1];
    this.hypers = { lr: s.lr, momentum: s.momentum, optimizer: s.optimizer, seed: s.seed };
    return true;
  }

  private ingestAck(id: number, ok: boolean, reason: string | undefined, now: number): boolean {
    const cmd = this.pending.get(id);
    if (!cmd) return false;
    this.pending.delete(id);
    if (cmd.cmd === "set_hyper" && cmd.key) {
      if (ok) {
        this.lastAcked.set(cmd.key, cmd.value);
        this.annotations.push({
          samples_seen: this.lastSample,
          label: `${cmd.key}=${cmd.value}`,
        });
      } else {
        this.warnings.push({ at: now, text: `${cmd.key} rejected: ${reason ?? "no reason"}` });
      }
    } else if (!ok) {
      this.warnings.push({ at: now, text: `${cmd.cmd} rejected: ${reason ?? "no reason"}` });
    } else if (cmd.cmd === "start") {
      this.started = true;
    }
    return true;
  }

  /** Clear pending commands that outlived the ack timeout. */
  tick(now = Date.now()): void {
    for (const [id, p] of [...this.pending]) {
      if (now - p.sentAt > this.timeoutMs) {
        this.pending.delete(id);
        this.warnings.push({ at: now, text: `${p.cmd} ${p.key ?? ""} timed out (id ${id})` });
      }
    }
  }

  /** Send a control message, tracking its id until ack or timeout. */
  send(cmd: ControlMessage["cmd"], fields: Partial<ControlMessage> = {}, now = Date.now()): number {
    if (!this.sender) throw new Error("not connected");
    const id = this.nextId++;
    const msg: ControlMessage = { cmd, id, ...fields };
    this.pending.set(id, { id, cmd, key: msg.key, value: msg.value, sentAt: now });
    this.sender(msg);
    return id;
  }

  sendHyper(key: string, value: unknown, now = Date.now()): number {
    return this.send("set_hyper", { key, value }, now);
  }
}

/** The drawable projection of a SessionView: aligned panels plus bars. */
export interface ChartModel {
  panels: {
    loss: ChartPoint[];
    train_acc: ChartPoint[];
    test_acc: ChartPoint[];
  };
  annotations: Annotation[];
  f1Bars: number[];
  empty: boolean;
}

export function buildChartModel(view: SessionView, maxPoints = 2000): ChartModel {
  const visible = decimate(view.points, maxPoints);
  return {
    panels: { loss: visible, train_acc: visible, test_acc: visible },
    annotations: [...view.annotations],
    f1Bars: [...view.f1Snapshot],
    empty: visible.length === 0,
  };
}
