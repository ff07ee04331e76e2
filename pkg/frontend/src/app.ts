/**
 * Browser bootstrap: WebSocket to the relay, control form wiring, and a
 * paint loop. All state lives in SessionView; this file only moves
 * messages and pixels.
 */

import { paint } from "./charts.js";
import { parseEngineLine } from "./protocol.js";
import { buildChartModel, SessionView } from "./session.js";
import { validateHyper, validateSeed } from "./validate.js";

const RECONNECT_DELAY_MS = 2000;

const view = new SessionView();
let ws: WebSocket | null = null;

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

function input(id: string): HTMLInputElement {
  return $(id) as HTMLInputElement;
}

function connect(): void {
  view.connection = "connecting";
  renderStatus();
  const url = `${location.protocol === "https:" ? "wss" : "ws"}://${location.host}/ws`;
  ws = new WebSocket(url);
  ws.onopen = () => {
    view.attach((msg) => ws?.send(JSON.stringify(msg)));
    renderStatus();
  };
  ws.onmessage = (e) => {
    const msg = parseEngineLine(String(e.data));
    if (msg && view.ingest(msg)) render();
  };
  ws.onclose = () => {
    view.detach();
    renderStatus();
    setTimeout(connect, RECONNECT_DELAY_MS); // retry; dedup by samples_seen
  };
  ws.onerror = () => ws?.close();
}

function warn(text: string): void {
  $("warnings").textContent = text;
}

function sendHyper(key: string, value: unknown): void {
  const check = validateHyper(key, value);
  if (!check.ok) {
    warn(check.reason ?? "invalid value");
    return;
  }
  if (view.connection !== "connected") {
    warn("not connected");
    return;
  }
  view.sendHyper(key, value);
  renderStatus();
}

function wireForm(): void {
  $("apply-lr").onclick = () => sendHyper("lr", Number(input("lr").value));
  $("apply-momentum").onclick = () => sendHyper("momentum", Number(input("momentum").value));
  $("apply-optimizer").onclick = () =>
    sendHyper("optimizer", (input("optimizer") as unknown as HTMLSelectElement).value);
  $("apply-dropout").onclick = () => {
    const enabled = input("dropout-on").checked;
    sendHyper("dropout_rate", enabled ? Number(input("dropout-rate").value) : 0.0);
  };
  $("btn-start").onclick = () => {
    const seed = input("seed").value;
    const check = validateSeed(seed, view.started);
    if (!check.ok) {
      warn(check.reason ?? "bad seed");
      return;
    }
    view.send("configure", {
      value: {
        dataset: input("dataset").value,
        arch: input("arch").value,
        seed: Number(seed),
        lr: Number(input("lr").value),
        momentum: Number(input("momentum").value),
        optimizer: (input("optimizer") as unknown as HTMLSelectElement).value,
        dropout_rate: input("dropout-on").checked ? Number(input("dropout-rate").value) : 0.0,
        batch_size: 32,
      },
    });
    view.send("start");
  };
  $("btn-pause").onclick = () => view.send("pause");
  $("btn-resume").onclick = () => view.send("resume");
  $("btn-stop").onclick = () => view.send("stop");
}

function renderStatus(): void {
  const banner = $("connection");
  banner.textContent = view.connection === "connected"
    ? `connected — engine ${view.engineState}`
    : view.connection === "connecting" ? "connecting…" : "disconnected — retrying";
  banner.className = view.connection;
  $("pending").textContent = view.pending.size ? `${view.pending.size} command(s) pending` : "";
  const h = view.hypers;
  $("echo").textContent = h.lr === null ? "no stats yet"
    : `engine says: lr=${h.lr} momentum=${h.momentum} optimizer=${h.optimizer} seed=${h.seed}`;
  input("seed").disabled = view.started;
  const latest = view.warnings[view.warnings.length - 1];
  if (latest) warn(latest.text);
}

function render(): void {
  renderStatus();
  const model = buildChartModel(view);
  const size = { w: 560, h: 180, f1h: 120 };
  paint(model, {
    loss: canvasCtx("chart-loss"),
    train: canvasCtx("chart-train"),
    test: canvasCtx("chart-test"),
    f1: canvasCtx("chart-f1"),
  }, size);
}

function canvasCtx(id: string): CanvasRenderingContext2D {
  const canvas = $(id) as HTMLCanvasElement;
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("no 2d context");
  return ctx;
}

window.addEventListener("DOMContentLoaded", () => {
  wireForm();
  connect();
  setInterval(() => {
    view.tick();
    renderStatus();
  }, 1000);
});
