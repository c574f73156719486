/**
 * Butterfly rendering: one horizontal segment per band row at height alpha,
 * x spanning [e_lo, e_hi].  Flat-band rows (e_lo = e_hi = 0) can be pulled
 * into a distinct overlay group.  The SVG contains exactly one <line>
 * element per rendered CSV row, so structural tests can count them.
 */

import { BandRow, isFlatBandRow } from "./schema.js";
import { svgDocument, tag, text } from "./svg.js";

export interface PlotSpec {
  modelFilter?: string;
  colorBy: "q" | "model";
  flatBandHighlight: boolean;
  width: number;
  height: number;
  xRange?: [number, number];
  yRange?: [number, number];
}

export const DEFAULT_SPEC: PlotSpec = {
  colorBy: "q",
  flatBandHighlight: false,
  width: 900,
  height: 600,
};

export class NoRowsError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "NoRowsError";
  }
}

const MARGIN = { left: 64, right: 16, top: 20, bottom: 48 };
const FLAT_COLOR = "#ff7f0e";
const MODEL_COLORS: Record<string, string> = {
  lieb: "#1f77b4",
  amo: "#d62728",
  general: "#2ca02c",
};

function colorFor(row: BandRow, colorBy: "q" | "model"): string {
  if (colorBy === "model") {
    return MODEL_COLORS[row.model] ?? "#555555";
  }
  const hue = Math.round((row.q * 137.508) % 360);
  return hslToHex(hue, 0.7, 0.4);
}

function hslToHex(h: number, s: number, l: number): string {
  const f = (n: number) => {
    const k = (n + h / 30) % 12;
    const c = l - s * Math.min(l, 1 - l) * Math.max(-1, Math.min(k - 3, 9 - k, 1));
    return Math.round(255 * c)
      .toString(16)
      .padStart(2, "0");
  };
  return `#${f(0)}${f(8)}${f(4)}`;
}

export function filterRows(rows: BandRow[], spec: PlotSpec): BandRow[] {
  const filtered = spec.modelFilter
    ? rows.filter((r) => r.model === spec.modelFilter)
    : rows;
  if (filtered.length === 0) {
    const why = spec.modelFilter ? ` after model filter ${JSON.stringify(spec.modelFilter)}` : "";
    throw new NoRowsError(`no rows to plot${why}`);
  }
  return filtered;
}

export interface Segment {
  x1: number;
  x2: number;
  y: number;
  color: string;
  flat: boolean;
}

export interface Geometry {
  segments: Segment[];
  xRange: [number, number];
  yRange: [number, number];
  plot: { x: number; y: number; width: number; height: number };
}

export function computeGeometry(rows: BandRow[], spec: PlotSpec): Geometry {
  const plotted = filterRows(rows, spec);
  const xs = plotted.flatMap((r) => [r.eLo, r.eHi]);
  const ys = plotted.map((r) => r.alpha);
  const xRange = spec.xRange ?? [Math.min(...xs), Math.max(...xs)];
  const yRange = spec.yRange ?? [Math.min(...ys), Math.max(...ys)];
  const spanX = xRange[1] - xRange[0] || 1;
  const spanY = yRange[1] - yRange[0] || 1;
  const plotW = spec.width - MARGIN.left - MARGIN.right;
  const plotH = spec.height - MARGIN.top - MARGIN.bottom;
  const xPix = (e: number) => MARGIN.left + ((e - xRange[0]) / spanX) * plotW;
  const yPix = (a: number) => MARGIN.top + plotH - ((a - yRange[0]) / spanY) * plotH;

  const segments: Segment[] = plotted.map((row) => {
    let x1 = xPix(row.eLo);
    let x2 = xPix(row.eHi);
    if (x2 - x1 < 1.0) {
      // zero-width (flat band) and hairline segments keep a visible extent
      const mid = (x1 + x2) / 2;
      x1 = mid - 0.5;
      x2 = mid + 0.5;
    }
    const flat = isFlatBandRow(row);
    return {
      x1,
      x2,
      y: yPix(row.alpha),
      color: flat && spec.flatBandHighlight ? FLAT_COLOR : colorFor(row, spec.colorBy),
      flat,
    };
  });
  return {
    segments,
    xRange,
    yRange,
    plot: { x: MARGIN.left, y: MARGIN.top, width: plotW, height: plotH },
  };
}

export interface RenderResult {
  svg: string;
  rowCount: number;
  xRange: [number, number];
  yRange: [number, number];
}

export function renderButterfly(rows: BandRow[], spec: PlotSpec = DEFAULT_SPEC): RenderResult {
  const geo = computeGeometry(rows, spec);
  const line = (s: Segment) =>
    tag("line", {
      x1: s.x1.toFixed(2),
      y1: s.y.toFixed(2),
      x2: s.x2.toFixed(2),
      y2: s.y.toFixed(2),
      stroke: s.color,
      "stroke-width": s.flat && spec.flatBandHighlight ? 1.6 : 1.0,
    });
  const bandLines = geo.segments
    .filter((s) => !(s.flat && spec.flatBandHighlight))
    .map(line);
  const flatLines = geo.segments.filter((s) => s.flat && spec.flatBandHighlight).map(line);

  const { plot } = geo;
  const axes: string[] = [
    tag("rect", {
      x: plot.x,
      y: plot.y,
      width: plot.width,
      height: plot.height,
      fill: "none",
      stroke: "#222222",
      "stroke-width": 1,
    }),
    text(`energy E  [${geo.xRange[0].toPrecision(6)}, ${geo.xRange[1].toPrecision(6)}]`, {
      x: plot.x + plot.width / 2,
      y: spec.height - 12,
      "text-anchor": "middle",
      "font-family": "sans-serif",
      "font-size": 14,
    }),
    text("flux α", {
      x: 18,
      y: plot.y + plot.height / 2,
      "text-anchor": "middle",
      "font-family": "sans-serif",
      "font-size": 14,
      transform: `rotate(-90 18 ${plot.y + plot.height / 2})`,
    }),
  ];

  const groups = [
    tag("g", { class: "axes" }, axes),
    tag("g", { class: "bands" }, bandLines),
  ];
  if (spec.flatBandHighlight) {
    groups.push(tag("g", { class: "flat-band" }, flatLines));
  }
  return {
    svg: svgDocument(spec.width, spec.height, groups),
    rowCount: geo.segments.length,
    xRange: geo.xRange,
    yRange: geo.yRange,
  };
}
