/**
 * Small deterministic raster plotter: an RGB pixel buffer with line/marker
 * drawing, linear or log axes with tick labels, and a bitmap-font text
 * renderer. No system fonts, no timestamps — identical inputs give identical
 * pixels.
 */

import { GLYPH_H, GLYPH_W, glyph } from "./font.js";

export type Rgb = [number, number, number];

export const COLORS: Record<string, Rgb> = {
  black: [0, 0, 0],
  gray: [150, 150, 150],
  lightgray: [220, 220, 220],
  blue: [31, 119, 180],
  orange: [255, 127, 14],
  green: [44, 160, 44],
  red: [214, 39, 40],
  white: [255, 255, 255],
};

export class Canvas {
  readonly pixels: Uint8Array;

  constructor(
    readonly width: number,
    readonly height: number,
    background: Rgb = COLORS.white,
  ) {
    this.pixels = new Uint8Array(width * height * 3);
    for (let i = 0; i < width * height; i++) {
      this.pixels[3 * i] = background[0];
      this.pixels[3 * i + 1] = background[1];
      this.pixels[3 * i + 2] = background[2];
    }
  }

  set(x: number, y: number, c: Rgb): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const i = 3 * (y * this.width + x);
    this.pixels[i] = c[0];
    this.pixels[i + 1] = c[1];
    this.pixels[i + 2] = c[2];
  }

  /** Bresenham line. */
  line(x0: number, y0: number, x1: number, y1: number, c: Rgb, thick = 1): void {
    x0 = Math.round(x0); y0 = Math.round(y0);
    x1 = Math.round(x1); y1 = Math.round(y1);
    const dx = Math.abs(x1 - x0);
    const dy = -Math.abs(y1 - y0);
    const sx = x0 < x1 ? 1 : -1;
    const sy = y0 < y1 ? 1 : -1;
    let err = dx + dy;
    for (;;) {
      this.dot(x0, y0, c, thick);
      if (x0 === x1 && y0 === y1) break;
      const e2 = 2 * err;
      if (e2 >= dy) { err += dy; x0 += sx; }
      if (e2 <= dx) { err += dx; y0 += sy; }
    }
  }

  dot(x: number, y: number, c: Rgb, size = 1): void {
    const r = Math.floor(size / 2);
    for (let j = -r; j <= r; j++) {
      for (let i = -r; i <= r; i++) {
        this.set(x + i, y + j, c);
      }
    }
  }

  text(x: number, y: number, s: string, c: Rgb, scale = 1): void {
    let cx = Math.round(x);
    const cy = Math.round(y);
    for (const ch of s) {
      const rows = glyph(ch);
      if (rows) {
        for (let gy = 0; gy < GLYPH_H; gy++) {
          for (let gx = 0; gx < GLYPH_W; gx++) {
            if (rows[gy][gx] === "#") {
              for (let sy = 0; sy < scale; sy++) {
                for (let sx = 0; sx < scale; sx++) {
                  this.set(cx + gx * scale + sx, cy + gy * scale + sy, c);
                }
              }
            }
          }
        }
      }
      cx += (GLYPH_W + 1) * scale;
    }
  }
}

export interface Series {
  x: number[];
  y: number[];
  color: Rgb;
  label?: string;
  markers?: boolean;
  dashed?: boolean;
}

export interface PlotOptions {
  title: string;
  xlabel: string;
  ylabel: string;
  width?: number;
  height?: number;
  logY?: boolean;
  /** vertical marker lines: [{x, label}] */
  vlines?: { x: number; label: string; color?: Rgb }[];
}

function niceTicks(lo: number, hi: number, target = 6): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step0 = span / target;
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  let step = mag;
  for (const m of [1, 2, 2.5, 5, 10]) {
    if (m * mag >= step0) { step = m * mag; break; }
  }
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-12 * span; v += step) {
    ticks.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return ticks;
}

export function formatTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) {
    return v.toExponential(1).replace("e+", "e").replace(/e(-?)0*(\d)/, "e$1$2");
  }
  const s = v.toPrecision(4);
  return s.includes(".") ? s.replace(/\.?0+$/, "") : s;
}

/** Render series into a framed, labelled plot and return the canvas. */
export function renderPlot(series: Series[], opts: PlotOptions): Canvas {
  const W = opts.width ?? 720;
  const H = opts.height ?? 480;
  const cv = new Canvas(W, H);
  const ml = 78; // margins
  const mr = 20;
  const mt = 34;
  const mb = 52;
  const px0 = ml;
  const px1 = W - mr;
  const py0 = mt;
  const py1 = H - mb;

  let xlo = Infinity, xhi = -Infinity, ylo = Infinity, yhi = -Infinity;
  for (const s of series) {
    for (let i = 0; i < s.x.length; i++) {
      const yv = s.y[i];
      if (!Number.isFinite(s.x[i]) || !Number.isFinite(yv)) continue;
      if (opts.logY && yv <= 0) continue;
      xlo = Math.min(xlo, s.x[i]); xhi = Math.max(xhi, s.x[i]);
      ylo = Math.min(ylo, yv); yhi = Math.max(yhi, yv);
    }
  }
  for (const vl of opts.vlines ?? []) {
    xlo = Math.min(xlo, vl.x); xhi = Math.max(xhi, vl.x);
  }
  if (!Number.isFinite(xlo) || !Number.isFinite(ylo)) {
    throw new Error("no finite data points to plot");
  }
  if (xhi === xlo) { xhi = xlo + 1; }
  if (yhi === ylo) { yhi = ylo + (Math.abs(ylo) || 1) * 1e-3; }
  const ypad = opts.logY ? 0 : 0.06 * (yhi - ylo);
  ylo -= ypad; yhi += ypad;

  const ty = opts.logY
    ? (v: number) => Math.log10(v)
    : (v: number) => v;
  const tylo = ty(ylo);
  const tyhi = ty(yhi);

  const sx = (v: number) => px0 + ((v - xlo) / (xhi - xlo)) * (px1 - px0);
  const sy = (v: number) => py1 - ((ty(v) - tylo) / (tyhi - tylo)) * (py1 - py0);

  // grid + ticks
  const xticks = niceTicks(xlo, xhi);
  let yticks: number[];
  if (opts.logY) {
    yticks = [];
    const d0 = Math.ceil(Math.log10(ylo));
    const d1 = Math.floor(Math.log10(yhi));
    const stride = Math.max(1, Math.ceil((d1 - d0) / 6));
    for (let d = d0; d <= d1; d += stride) yticks.push(Math.pow(10, d));
    if (yticks.length === 0) yticks = [ylo, yhi];
  } else {
    yticks = niceTicks(ylo, yhi);
  }

  for (const v of xticks) {
    const x = Math.round(sx(v));
    cv.line(x, py0, x, py1, COLORS.lightgray);
    const lbl = formatTick(v);
    cv.text(x - (lbl.length * (GLYPH_W + 1)) / 2, py1 + 8, lbl, COLORS.black);
  }
  for (const v of yticks) {
    const y = Math.round(sy(v));
    cv.line(px0, y, px1, y, COLORS.lightgray);
    const lbl = formatTick(v);
    cv.text(px0 - 6 - lbl.length * (GLYPH_W + 1), y - 3, lbl, COLORS.black);
  }

  // frame
  cv.line(px0, py0, px1, py0, COLORS.black);
  cv.line(px0, py1, px1, py1, COLORS.black);
  cv.line(px0, py0, px0, py1, COLORS.black);
  cv.line(px1, py0, px1, py1, COLORS.black);

  // vlines
  for (const vl of opts.vlines ?? []) {
    const x = Math.round(sx(vl.x));
    const c = vl.color ?? COLORS.red;
    for (let y = py0; y <= py1; y += 4) {
      cv.line(x, y, x, Math.min(y + 2, py1), c);
    }
    const lw = vl.label.length * (GLYPH_W + 1);
    const lx = x + 4 + lw > px1 ? x - 4 - lw : x + 4;
    cv.text(lx, py0 + 4, vl.label, c);
  }

  // series
  for (const s of series) {
    let prev: [number, number] | null = null;
    for (let i = 0; i < s.x.length; i++) {
      const yv = s.y[i];
      if (!Number.isFinite(s.x[i]) || !Number.isFinite(yv) || (opts.logY && yv <= 0)) {
        prev = null;
        continue;
      }
      const x = sx(s.x[i]);
      const y = sy(yv);
      if (prev && !(s.dashed && i % 2 === 0)) {
        cv.line(prev[0], prev[1], x, y, s.color, 2);
      }
      if (s.markers) cv.dot(Math.round(x), Math.round(y), s.color, 5);
      prev = [x, y];
    }
  }

  // legend (top-left inside frame), deterministic order = series order
  let ly = py0 + 6;
  for (const s of series) {
    if (!s.label) continue;
    cv.line(px0 + 8, ly + 3, px0 + 26, ly + 3, s.color, 3);
    cv.text(px0 + 32, ly, s.label, COLORS.black);
    ly += 12;
  }

  // title and axis labels
  cv.text(px0, 10, opts.title, COLORS.black, 2);
  cv.text(
    (px0 + px1) / 2 - (opts.xlabel.length * (GLYPH_W + 1)) / 2,
    H - 18,
    opts.xlabel,
    COLORS.black,
  );
  cv.text(6, py0 - 16, opts.ylabel, COLORS.black);

  return cv;
}
