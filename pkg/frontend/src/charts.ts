/**
 * Canvas painters for the chart model. Pure drawing: all data decisions
 * (decimation, annotation placement) happen in buildChartModel.
 */

import type { Annotation, ChartModel, ChartPoint } from "./session.js";

export interface PanelSpec {
  title: string;
  field: keyof Omit<ChartPoint, "samples_seen">;
  color: string;
  yMax?: number; // fixed axis for accuracies; loss auto-scales
}

export const PANELS: PanelSpec[] = [
  { title: "loss", field: "loss", color: "#c0392b" },
  { title: "train accuracy", field: "train_acc", color: "#27ae60", yMax: 1 },
  { title: "test accuracy", field: "test_acc", color: "#2980b9", yMax: 1 },
];

const MARGIN = { left: 44, right: 8, top: 18, bottom: 22 };

function scales(points: ChartPoint[], spec: PanelSpec, w: number, h: number) {
  const xs = points.map((p) => p.samples_seen);
  const ys = points.map((p) => Number(p[spec.field]));
  const xMin = xs[0];
  const xMax = xs[xs.length - 1] > xMin ? xs[xs.length - 1] : xMin + 1;
  const yMax = spec.yMax ?? Math.max(...ys, 1e-9) * 1.05;
  const plotW = w - MARGIN.left - MARGIN.right;
  const plotH = h - MARGIN.top - MARGIN.bottom;
  return {
    x: (v: number) => MARGIN.left + ((v - xMin) / (xMax - xMin)) * plotW,
    y: (v: number) => MARGIN.top + plotH - (Math.max(0, Math.min(v, yMax)) / yMax) * plotH,
    yMax,
  };
}

export function drawPanel(
  ctx: CanvasRenderingContext2D,
  spec: PanelSpec,
  points: ChartPoint[],
  annotations: Annotation[],
  w: number,
  h: number,
): void {
  ctx.clearRect(0, 0, w, h);
  ctx.font = "11px sans-serif";
  ctx.fillStyle = "#444";
  ctx.fillText(spec.title, MARGIN.left, 12);
  if (!points.length) {
    ctx.fillStyle = "#999";
    ctx.fillText("waiting for stats…", w / 2 - 40, h / 2);
    return;
  }
  const s = scales(points, spec, w, h);
  ctx.strokeStyle = "#ddd";
  ctx.strokeRect(MARGIN.left, MARGIN.top, w - MARGIN.left - MARGIN.right, h - MARGIN.top - MARGIN.bottom);
  ctx.fillStyle = "#666";
  ctx.fillText(s.yMax.toPrecision(3), 2, MARGIN.top + 8);
  ctx.fillText("0", 2, h - MARGIN.bottom);
  ctx.fillText(String(points[points.length - 1].samples_seen), w - 70, h - 6);

  ctx.strokeStyle = spec.color;
  ctx.beginPath();
  points.forEach((p, i) => {
    const x = s.x(p.samples_seen);
    const y = s.y(Number(p[spec.field]));
    if (i === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  });
  ctx.stroke();

  ctx.strokeStyle = "#8e44ad";
  ctx.fillStyle = "#8e44ad";
  for (const a of annotations) {
    const x = s.x(a.samples_seen);
    ctx.beginPath();
    ctx.moveTo(x, MARGIN.top);
    ctx.lineTo(x, h - MARGIN.bottom);
    ctx.stroke();
    if (spec.title === "loss") ctx.fillText(a.label, x + 2, MARGIN.top + 10);
  }
}

export function drawF1Bars(ctx: CanvasRenderingContext2D, f1: number[], w: number, h: number): void {
  ctx.clearRect(0, 0, w, h);
  ctx.font = "11px sans-serif";
  ctx.fillStyle = "#444";
  ctx.fillText("per-class F1 (%)", 4, 12);
  const barW = (w - 20) / 10;
  for (let d = 0; d < 10; d++) {
    const v = f1[d] ?? 0;
    const bh = (v / 100) * (h - 34);
    ctx.fillStyle = "#16a085";
    ctx.fillRect(10 + d * barW, h - 18 - bh, barW - 6, bh);
    ctx.fillStyle = "#444";
    ctx.fillText(String(d), 10 + d * barW + barW / 2 - 6, h - 5);
  }
}

export function paint(
  model: ChartModel,
  contexts: { loss: CanvasRenderingContext2D; train: CanvasRenderingContext2D; test: CanvasRenderingContext2D; f1: CanvasRenderingContext2D },
  size: { w: number; h: number; f1h: number },
): void {
  drawPanel(contexts.loss, PANELS[0], model.panels.loss, model.annotations, size.w, size.h);
  drawPanel(contexts.train, PANELS[1], model.panels.train_acc, model.annotations, size.w, size.h);
  drawPanel(contexts.test, PANELS[2], model.panels.test_acc, model.annotations, size.w, size.h);
  drawF1Bars(contexts.f1, model.f1Bars, size.w, size.f1h);
}
