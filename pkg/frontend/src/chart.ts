/**
 * Minimal deterministic line-chart renderer on a raster canvas.
 *
 * Fixed styles, no randomness: identical inputs produce identical PNG
 * bytes, which the tests rely on.
 */

import { createCanvas, SKRSContext2D } from "@napi-rs/canvas";

export interface Series {
  label: string;
  x: number[];
  y: number[];
  color?: string;
  width?: number;
  dash?: number[];
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  width?: number;
  height?: number;
}

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

const MARGIN = { top: 34, right: 16, bottom: 42, left: 64 };

/** Round-valued tick positions covering [lo, hi] with a 1-2-5 step. */
export function ticks(lo: number, hi: number, target = 6): number[] {
  if (!(hi > lo)) {
    const pad = Math.max(Math.abs(lo) * 0.1, 1e-12);
    return ticks(lo - pad, lo + pad, target);
  }
  const rawStep = (hi - lo) / Math.max(target - 1, 1);
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    if (m * mag >= rawStep) {
      step = m * mag;
      break;
    }
  }
  const first = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = first; v <= hi + step * 1e-9; v += step) {
    out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return out;
}

export function formatTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1);
  return String(Number(v.toPrecision(6)));
}

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (!Number.isFinite(v)) continue;
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (lo === Infinity) return [0, 1];
  if (lo === hi) return [lo - 1, hi + 1];
  return [lo, hi];
}

export function renderChart(spec: ChartSpec): Buffer {
  if (spec.series.length === 0) {
    throw new Error(`chart '${spec.title}' has no series`);
  }
  const width = spec.width ?? 900;
  const height = spec.height ?? 480;
  const canvas = createCanvas(width, height);
  const ctx = canvas.getContext("2d");

  ctx.fillStyle = "#ffffff";
  ctx.fillRect(0, 0, width, height);

  const [x0, x1] = extent(spec.series.flatMap((s) => s.x));
  let [y0, y1] = extent(spec.series.flatMap((s) => s.y));
  const pad = (y1 - y0) * 0.06;
  y0 -= pad;
  y1 += pad;

  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;
  const px = (v: number) => MARGIN.left + ((v - x0) / (x1 - x0)) * plotW;
  const py = (v: number) => MARGIN.top + (1 - (v - y0) / (y1 - y0)) * plotH;

  drawGridAndAxes(ctx, spec, { x0, x1, y0, y1, px, py, width, height, plotW, plotH });

  for (let i = 0; i < spec.series.length; i++) {
    const s = spec.series[i];
    ctx.strokeStyle = s.color ?? PALETTE[i % PALETTE.length];
    ctx.lineWidth = s.width ?? 1.6;
    ctx.setLineDash(s.dash ?? []);
    ctx.beginPath();
    let started = false;
    for (let k = 0; k < s.x.length; k++) {
      const X = px(s.x[k]);
      const Y = py(s.y[k]);
      if (!Number.isFinite(X) || !Number.isFinite(Y)) {
        started = false;
        continue;
      }
      if (started) ctx.lineTo(X, Y);
      else {
        ctx.moveTo(X, Y);
        started = true;
      }
    }
    ctx.stroke();
    ctx.setLineDash([]);
  }

  drawLegend(ctx, spec.series);
  return canvas.toBuffer("image/png");
}

interface Frame {
  x0: number;
  x1: number;
  y0: number;
  y1: number;
  px: (v: number) => number;
  py: (v: number) => number;
  width: number;
  height: number;
  plotW: number;
  plotH: number;
}

function drawGridAndAxes(ctx: SKRSContext2D, spec: ChartSpec, f: Frame): void {
  ctx.strokeStyle = "#dddddd";
  ctx.lineWidth = 1;
  ctx.fillStyle = "#333333";
  ctx.font = "12px sans-serif";

  for (const tv of ticks(f.x0, f.x1)) {
    const X = f.px(tv);
    ctx.beginPath();
    ctx.moveTo(X, MARGIN.top);
    ctx.lineTo(X, MARGIN.top + f.plotH);
    ctx.stroke();
    ctx.textAlign = "center";
    ctx.fillText(formatTick(tv), X, MARGIN.top + f.plotH + 16);
  }
  for (const tv of ticks(f.y0, f.y1)) {
    const Y = f.py(tv);
    ctx.beginPath();
    ctx.moveTo(MARGIN.left, Y);
    ctx.lineTo(MARGIN.left + f.plotW, Y);
    ctx.stroke();
    ctx.textAlign = "right";
    ctx.fillText(formatTick(tv), MARGIN.left - 6, Y + 4);
  }

  ctx.strokeStyle = "#000000";
  ctx.strokeRect(MARGIN.left, MARGIN.top, f.plotW, f.plotH);

  ctx.fillStyle = "#000000";
  ctx.font = "bold 14px sans-serif";
  ctx.textAlign = "center";
  ctx.fillText(spec.title, f.width / 2, 20);
  ctx.font = "12px sans-serif";
  ctx.fillText(spec.xLabel, MARGIN.left + f.plotW / 2, f.height - 8);
  ctx.save();
  ctx.translate(16, MARGIN.top + f.plotH / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(spec.yLabel, 0, 0);
  ctx.restore();
}

function drawLegend(ctx: SKRSContext2D, series: Series[]): void {
  ctx.font = "12px sans-serif";
  const entryH = 16;
  const textW = Math.max(...series.map((s) => ctx.measureText(s.label).width));
  const boxW = textW + 36;
  const boxH = series.length * entryH + 8;
  const bx = MARGIN.left + 10;
  const by = MARGIN.top + 8;

  ctx.fillStyle = "rgba(255,255,255,0.85)";
  ctx.fillRect(bx, by, boxW, boxH);
  ctx.strokeStyle = "#999999";
  ctx.lineWidth = 1;
  ctx.strokeRect(bx, by, boxW, boxH);

  series.forEach((s, i) => {
    const y = by + 12 + i * entryH;
    ctx.strokeStyle = s.color ?? PALETTE[i % PALETTE.length];
    ctx.lineWidth = s.width ?? 1.6;
    ctx.setLineDash(s.dash ?? []);
    ctx.beginPath();
    ctx.moveTo(bx + 6, y);
    ctx.lineTo(bx + 24, y);
    ctx.stroke();
    ctx.setLineDash([]);
    ctx.fillStyle = "#000000";
    ctx.textAlign = "left";
    ctx.fillText(s.label, bx + 30, y + 4);
  });
}
