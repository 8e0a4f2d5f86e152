/**
 * Tiny software rasterizer for line/scatter charts: white canvas, axes box,
 * nice-number ticks with a 5x7 bitmap charset for the labels, Bresenham
 * polylines, filled markers.  Deterministic by construction.
 */

import { encodePng } from "./png.js";

export type Rgb = [number, number, number];

export const COLORS: Rgb[] = [
  [31, 119, 180],
  [255, 127, 14],
  [44, 160, 44],
  [214, 39, 40],
  [148, 103, 189],
];

// 5x7 glyphs, one byte per row, low 5 bits used (MSB = leftmost column)
const FONT: Record<string, number[]> = {
  "0": [0x0e, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0e],
  "1": [0x04, 0x0c, 0x04, 0x04, 0x04, 0x04, 0x0e],
  "2": [0x0e, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1f],
  "3": [0x1f, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0e],
  "4": [0x02, 0x06, 0x0a, 0x12, 0x1f, 0x02, 0x02],
  "5": [0x1f, 0x10, 0x1e, 0x01, 0x01, 0x11, 0x0e],
  "6": [0x06, 0x08, 0x10, 0x1e, 0x11, 0x11, 0x0e],
  "7": [0x1f, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08],
  "8": [0x0e, 0x11, 0x11, 0x0e, 0x11, 0x11, 0x0e],
  "9": [0x0e, 0x11, 0x11, 0x0f, 0x01, 0x02, 0x0c],
  "-": [0x00, 0x00, 0x00, 0x1f, 0x00, 0x00, 0x00],
  "+": [0x00, 0x04, 0x04, 0x1f, 0x04, 0x04, 0x00],
  ".": [0x00, 0x00, 0x00, 0x00, 0x00, 0x0c, 0x0c],
  e: [0x00, 0x00, 0x0e, 0x11, 0x1f, 0x10, 0x0e],
  " ": [0, 0, 0, 0, 0, 0, 0],
};

export class Canvas {
  readonly width: number;
  readonly height: number;
  readonly data: Uint8Array;

  constructor(width: number, height: number) {
    this.width = width;
    this.height = height;
    this.data = new Uint8Array(width * height * 4).fill(255);
  }

  set(x: number, y: number, [r, g, b]: Rgb): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const i = (y * this.width + x) * 4;
    this.data[i] = r;
    this.data[i + 1] = g;
    this.data[i + 2] = b;
    this.data[i + 3] = 255;
  }

  line(x0: number, y0: number, x1: number, y1: number, color: Rgb): void {
    let [xa, ya] = [Math.round(x0), Math.round(y0)];
    const [xb, yb] = [Math.round(x1), Math.round(y1)];
    const dx = Math.abs(xb - xa);
    const dy = -Math.abs(yb - ya);
    const sx = xa < xb ? 1 : -1;
    const sy = ya < yb ? 1 : -1;
    let err = dx + dy;
    for (;;) {
      this.set(xa, ya, color);
      if (xa === xb && ya === yb) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        xa += sx;
      }
      if (e2 <= dx) {
        err += dx;
        ya += sy;
      }
    }
  }

  marker(x: number, y: number, color: Rgb, size = 2): void {
    for (let dy = -size; dy <= size; dy++) {
      for (let dx = -size; dx <= size; dx++) {
        if (dx * dx + dy * dy <= size * size) {
          this.set(Math.round(x) + dx, Math.round(y) + dy, color);
        }
      }
    }
  }

  cross(x: number, y: number, color: Rgb, size = 4): void {
    for (let d = -size; d <= size; d++) {
      this.set(Math.round(x) + d, Math.round(y) + d, color);
      this.set(Math.round(x) + d, Math.round(y) - d, color);
    }
  }

  text(x: number, y: number, s: string, color: Rgb): void {
    let cx = Math.round(x);
    for (const ch of s) {
      const glyph = FONT[ch] ?? FONT[" "];
      for (let row = 0; row < 7; row++) {
        for (let col = 0; col < 5; col++) {
          if ((glyph[row] >> (4 - col)) & 1) {
            this.set(cx + col, Math.round(y) + row, color);
          }
        }
      }
      cx += 6;
    }
  }

  png(): Buffer {
    return encodePng(this.width, this.height, this.data);
  }
}

export interface Series {
  x: number[];
  y: number[];
  color?: Rgb;
  markers?: boolean;
}

export interface PlotOptions {
  width?: number;
  height?: number;
  logY?: boolean;
  /** drawn as crosses, e.g. conserved eigenvalues */
  crossPoints?: Array<[number, number]>;
  scatterOnly?: boolean;
}

function niceTicks(lo: number, hi: number, count = 5): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step0 = span / count;
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => span / s <= count)!;
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = first; v <= hi + 1e-12 * span; v += step) ticks.push(v);
  return ticks;
}

function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 0.01 && a < 10000) {
    return parseFloat(v.toPrecision(3)).toString();
  }
  return v.toExponential(0).replace("e", "e");
}

const AXIS: Rgb = [60, 60, 60];
const GRID: Rgb = [225, 225, 225];

export function renderChart(seriesList: Series[], opts: PlotOptions = {}): Buffer {
  const width = opts.width ?? 640;
  const height = opts.height ?? 420;
  const canvas = new Canvas(width, height);
  const mLeft = 56;
  const mRight = 14;
  const mTop = 14;
  const mBottom = 30;

  const xs = seriesList.flatMap((s) => s.x);
  let ys = seriesList.flatMap((s) => s.y);
  if (opts.crossPoints) {
    xs.push(...opts.crossPoints.map((p) => p[0]));
    ys.push(...opts.crossPoints.map((p) => p[1]));
  }
  if (opts.logY) {
    ys = ys.filter((v) => v > 0).map(Math.log10);
  }
  let xLo = Math.min(...xs);
  let xHi = Math.max(...xs);
  let yLo = Math.min(...ys);
  let yHi = Math.max(...ys);
  if (xHi === xLo) {
    xLo -= 1;
    xHi += 1;
  }
  if (yHi === yLo) {
    yLo -= 1;
    yHi += 1;
  }
  const padY = 0.05 * (yHi - yLo);
  yLo -= padY;
  yHi += padY;

  const px = (x: number) =>
    mLeft + ((x - xLo) / (xHi - xLo)) * (width - mLeft - mRight);
  const py = (yv: number) => {
    const v = opts.logY ? Math.log10(yv) : yv;
    return height - mBottom - ((v - yLo) / (yHi - yLo)) * (height - mTop - mBottom);
  };
  const pyRaw = (v: number) =>
    height - mBottom - ((v - yLo) / (yHi - yLo)) * (height - mTop - mBottom);

  // grid and ticks
  for (const tx of niceTicks(xLo, xHi, 6)) {
    const gx = Math.round(px(tx));
    canvas.line(gx, mTop, gx, height - mBottom, GRID);
    canvas.text(gx - 3 * fmtTick(tx).length, height - mBottom + 6, fmtTick(tx), AXIS);
  }
  for (const ty of niceTicks(yLo, yHi, 6)) {
    const gy = Math.round(pyRaw(ty));
    canvas.line(mLeft, gy, width - mRight, gy, GRID);
    const label = opts.logY ? `1e${fmtTick(ty)}` : fmtTick(ty);
    canvas.text(mLeft - 6 * label.length - 6, gy - 3, label, AXIS);
  }
  // axes box
  canvas.line(mLeft, mTop, mLeft, height - mBottom, AXIS);
  canvas.line(mLeft, height - mBottom, width - mRight, height - mBottom, AXIS);
  canvas.line(width - mRight, mTop, width - mRight, height - mBottom, AXIS);
  canvas.line(mLeft, mTop, width - mRight, mTop, AXIS);

  seriesList.forEach((s, idx) => {
    const color = s.color ?? COLORS[idx % COLORS.length];
    const within = (v: number) => !opts.logY || v > 0;
    if (!opts.scatterOnly) {
      for (let i = 1; i < s.x.length; i++) {
        if (within(s.y[i - 1]) && within(s.y[i])) {
          canvas.line(px(s.x[i - 1]), py(s.y[i - 1]), px(s.x[i]), py(s.y[i]), color);
        }
      }
    }
    if (opts.scatterOnly || s.markers) {
      for (let i = 0; i < s.x.length; i++) {
        if (within(s.y[i])) canvas.marker(px(s.x[i]), py(s.y[i]), color);
      }
    }
  });

  for (const [cx, cy] of opts.crossPoints ?? []) {
    canvas.cross(px(cx), opts.logY ? py(cy) : pyRaw(cy), [214, 39, 40]);
  }

  return canvas.png();
}
