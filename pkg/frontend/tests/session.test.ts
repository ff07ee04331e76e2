import { describe, expect, it } from "vitest";

import { buildChartModel, SessionView } from "../src/session.js";
import type { ControlMessage, StatsEvent } from "../src/protocol.js";

function stats(samples: number, over: Partial<StatsEvent> = {}): StatsEvent {
  return {
    event: "stats",
    samples_seen: samples,
    loss: 2.3 - samples / 100000,
    train_acc: Math.min(0.9, samples / 50000),
    test_acc: Math.min(0.85, samples / 60000),
    per_class_f1: Array.from({ length: 10 }, (_, d) => 50 + d),
    lr: 0.1,
    momentum: 0.0,
    optimizer: "sgd",
    seed: 7,
    ...over,
  };
}

function connected(): { view: SessionView; sent: ControlMessage[] } {
  const view = new SessionView(1000);
  const sent: ControlMessage[] = [];
  view.attach((m) => sent.push(m));
  return { view, sent };
}

describe("stats stream replay", () => {
  it("renders a 1000-event stream into aligned panels", () => {
    const { view } = connected();
    for (let i = 0; i < 1000; i++) view.ingest(stats((i + 1) * 32));
    const model = buildChartModel(view);
    expect(model.empty).toBe(false);
    expect(model.panels.loss).toHaveLength(1000);
    expect(model.panels.train_acc).toHaveLength(1000);
    expect(model.panels.test_acc).toHaveLength(1000);
    // panels share x-values and stay sorted
    const xs = model.panels.loss.map((p) => p.samples_seen);
    expect(xs).toEqual([...xs].sort((a, b) => a - b));
    expect(model.f1Bars).toHaveLength(10);
    expect(view.hypers.lr).toBe(0.1);
    expect(view.hypers.seed).toBe(7);
  });

  it("keeps chart data equal to the stream (no smoothing)", () => {
    const { view } = connected();
    const sent = [stats(10, { loss: 1.25 }), stats(20, { loss: 0.75 })];
    for (const s of sent) view.ingest(s);
    const model = buildChartModel(view);
    expect(model.panels.loss.map((p) => p.loss)).toEqual([1.25, 0.75]);
  });

  it("drops duplicate and regressing x-values (reconnect replay)", () => {
    const { view } = connected();
    for (const n of [32, 64, 96]) view.ingest(stats(n));
    // engine snapshot replay after reconnect: same and older points
    expect(view.ingest(stats(96))).toBe(false);
    expect(view.ingest(stats(64))).toBe(false);
    view.ingest(stats(128));
    const xs = view.points.map((p) => p.samples_seen);
    expect(xs).toEqual([32, 64, 96, 128]);
    expect(new Set(xs).size).toBe(xs.length);
  });

  it("survives disconnect/reconnect without duplicated chart points", () => {
    const { view } = connected();
    const replayed = Array.from({ length: 50 }, (_, i) => stats((i + 1) * 10));
    for (const s of replayed.slice(0, 30)) view.ingest(s);
    view.detach();
    expect(view.connection).toBe("disconnected");
    view.attach(() => undefined);
    // the relay replays the latest snapshot first, then the stream resumes
    for (const s of replayed.slice(25)) view.ingest(s);
    const xs = view.points.map((p) => p.samples_seen);
    expect(new Set(xs).size).toBe(xs.length);
    expect(xs).toHaveLength(50);
  });
});

describe("hyperparameter commands", () => {
  it("tracks one annotation per acked change, none for rejects", () => {
    const { view } = connected();
    view.ingest(stats(100));
    const id1 = view.sendHyper("lr", 0.05);
    const id2 = view.sendHyper("momentum", 0.9);
    const id3 = view.sendHyper("lr", -1); // engine will reject
    view.ingest({ ack: id1, ok: true });
    view.ingest({ ack: id2, ok: true });
    view.ingest({ ack: id3, ok: false, reason: "lr must be > 0" });
    expect(view.annotations).toHaveLength(2);
    expect(view.annotations[0]).toEqual({ samples_seen: 100, label: "lr=0.05" });
    expect(view.warnings.some((w) => w.text.includes("rejected"))).toBe(true);
    expect(view.pending.size).toBe(0);
  });

  it("resolves every command id: ack or timeout", () => {
    const { view } = connected();
    const t0 = 1_000_000;
    const id1 = view.send("pause", {}, t0);
    const id2 = view.sendHyper("lr", 0.2, t0);
    view.ingest({ ack: id1, ok: true }, t0 + 10);
    view.tick(t0 + 5000); // past the 1000ms test timeout
    expect(view.pending.size).toBe(0);
    expect(view.warnings.some((w) => w.text.includes(`timed out (id ${id2})`))).toBe(true);
  });

  it("displays hyperparameters only from engine echoes", () => {
    const { view } = connected();
    const id = view.sendHyper("lr", 0.01);
    view.ingest({ ack: id, ok: true });
    expect(view.hypers.lr).toBeNull(); // no stats echo yet
    expect(view.lastAcked.get("lr")).toBe(0.01);
    view.ingest(stats(32, { lr: 0.01 }));
    expect(view.hypers.lr).toBe(0.01);
  });

  it("last write wins for rapid changes between batches", () => {
    const { view, sent } = connected();
    view.ingest(stats(32));
    const a = view.sendHyper("lr", 0.2);
    const b = view.sendHyper("lr", 0.3);
    view.ingest({ ack: a, ok: true });
    view.ingest({ ack: b, ok: true });
    // the engine applies in arrival order; the echo reflects the last one
    view.ingest(stats(64, { lr: 0.3 }));
    expect(view.hypers.lr).toBe(0.3);
    expect(sent.map((m) => m.value)).toEqual([0.2, 0.3]);
    expect(view.annotations).toHaveLength(2);
  });

  it("throws when sending while disconnected", () => {
    const view = new SessionView();
    expect(() => view.sendHyper("lr", 0.1)).toThrow(/not connected/);
  });
});

describe("engine state and errors", () => {
  it("tracks engine state events and started flag", () => {
    const { view } = connected();
    view.ingest({ event: "state", state: "running", samples_seen: 0 });
    expect(view.engineState).toBe("running");
    expect(view.started).toBe(true);
  });

  it("collects error events as warnings", () => {
    const { view } = connected();
    view.ingest({ event: "error", reason: "malformed message" });
    expect(view.warnings[0].text).toContain("malformed");
  });

  it("empty session renders placeholder model", () => {
    const view = new SessionView();
    const model = buildChartModel(view);
    expect(model.empty).toBe(true);
    expect(model.panels.loss).toHaveLength(0);
  });
});
