/**
 * The seven figure kinds, each a pure map from (CSV, metadata) to SVG.
 * Physics numbers come from the files; nothing is recomputed here beyond
 * presentation geometry (scales, the h=0 overlay from the metadata's
 * critical-point constants).
 */

import {
  Table,
  SchemaError,
  column,
  hasColumn,
  matchColumns,
  requireColumns,
} from "./csv.js";
import { Metadata, chartGeometry, modelSummary } from "./meta.js";
import { Figure, extent } from "./svg.js";

export type FigureKind =
  | "scurve"
  | "histogram"
  | "trajectory"
  | "velocity"
  | "locus"
  | "spacetime"
  | "phasediagram";

export const FIGURE_KINDS: FigureKind[] = [
  "scurve",
  "histogram",
  "trajectory",
  "velocity",
  "locus",
  "spacetime",
  "phasediagram",
];

const W = 640;
const H = 440;

function uniq(values: number[]): number[] {
  return [...new Set(values.filter((v) => Number.isFinite(v)))].sort((a, b) => a - b);
}

/** Mean-field S-curve cut: branch densities vs drive, solid when stable,
 * dashed when unstable. */
export function renderScurve(table: Table, meta: Metadata): string {
  requireColumns(table, ["kappa", "omega", "n_root_1", "stable_1"]);
  const kappas = uniq(column(table, "kappa"));
  if (kappas.length !== 1) {
    throw new SchemaError(
      `scurve expects a single-kappa cut, found ${kappas.length} kappa values`,
    );
  }
  const omega = column(table, "omega");
  const order = omega.map((_, i) => i).sort((a, b) => omega[a] - omega[b]);
  // branch k is the k-th root by density; draw each as a polyline broken
  // into solid (stable) and dashed (unstable) segments
  interface Seg {
    pts: Array<[number, number]>;
    stable: boolean;
  }
  const all: number[] = [];
  for (let k = 1; k <= 3; k++) {
    if (!hasColumn(table, `n_root_${k}`)) continue;
    for (const v of column(table, `n_root_${k}`)) {
      if (Number.isFinite(v)) all.push(v);
    }
  }
  const span = Math.max(...all) - Math.min(...all) || 1;
  const segments: Seg[] = [];
  for (let k = 1; k <= 3; k++) {
    if (!hasColumn(table, `n_root_${k}`)) continue;
    const n = column(table, `n_root_${k}`);
    const s = column(table, `stable_${k}`);
    let cur: Seg | null = null;
    for (const i of order) {
      if (!Number.isFinite(n[i])) {
        cur = null;
        continue;
      }
      const stable = s[i] === 1;
      const last = cur && cur.pts.length > 0 ? cur.pts[cur.pts.length - 1][1] : null;
      // density-sorted root indices splice across the fold where the root
      // count changes; never connect across such jumps
      const jump = last !== null && Math.abs(n[i] - last) > 0.2 * span;
      if (cur === null || cur.stable !== stable || jump) {
        const next: Seg = { pts: [], stable };
        if (cur !== null && cur.pts.length > 0 && !jump) {
          next.pts.push(cur.pts[cur.pts.length - 1]); // join at the switch
        }
        segments.push(next);
        cur = next;
      }
      cur.pts.push([omega[i], n[i]]);
    }
  }
  const fig = new Figure(W, H, extent(omega.filter(Number.isFinite)), extent(all));
  for (const seg of segments) {
    if (seg.pts.length < 2) {
      fig.dots(seg.pts, seg.stable ? "#1f77b4" : "#d62728", 2);
      continue;
    }
    fig.line(seg.pts, seg.stable ? "#1f77b4" : "#d62728", 1.8,
             seg.stable ? "" : "6,4");
  }
  fig.legend([
    ["stable branch", "#1f77b4", "line"],
    ["unstable branch", "#d62728", "dash"],
  ]);
  fig.axes("drive omega", "density N", `steady-state cut (kappa=${kappas[0]}) ${modelSummary(meta)}`);
  return fig.render();
}

/** Photon counting statistics P(n). */
export function renderHistogram(table: Table, meta: Metadata): string {
  requireColumns(table, ["n", "P_n"]);
  const n = column(table, "n");
  const p = column(table, "P_n");
  const fig = new Figure(W, H, [Math.min(...n) - 0.5, Math.max(...n) + 0.5], extent(p.concat([0])));
  for (let i = 0; i < n.length; i++) {
    const x0 = fig.plotX.at(n[i] - 0.45);
    const x1 = fig.plotX.at(n[i] + 0.45);
    const y0 = fig.plotY.at(0);
    const y1 = fig.plotY.at(p[i]);
    fig.raw(
      `<rect x="${x0.toFixed(2)}" y="${Math.min(y0, y1).toFixed(2)}" width="${(x1 - x0).toFixed(2)}" height="${Math.abs(y0 - y1).toFixed(2)}" fill="#1f77b4" stroke="white" stroke-width="0.5"/>`,
    );
  }
  fig.axes("photon number n", "P(n)", `counting statistics ${modelSummary(meta)}`);
  return fig.render();
}

/** Quantum-trajectory (or lattice) time series. */
export function renderTrajectory(table: Table, meta: Metadata): string {
  const ycol = hasColumn(table, "n_expect") ? "n_expect" : "mean_density";
  requireColumns(table, ["t", ycol]);
  const t = column(table, "t");
  const y = column(table, ycol);
  const fig = new Figure(W, H, extent(t, 0), extent(y));
  fig.line(t.map((ti, i) => [ti, y[i]]), "#1f77b4", 1.2);
  fig.axes("t", ycol, `trajectory ${modelSummary(meta)}`);
  return fig.render();
}

/** Wall velocity vs field with the analytic and shooting estimates. */
export function renderVelocity(table: Table, meta: Metadata): string {
  requireColumns(table, ["r", "h", "v", "v_err", "v_analytic", "v_shooting"]);
  const h = column(table, "h");
  const v = column(table, "v");
  const ve = column(table, "v_err");
  const va = column(table, "v_analytic");
  const vs = column(table, "v_shooting");
  const fig = new Figure(W, H, extent(h), extent(v.concat(va, vs)));
  const order = h.map((_, i) => i).sort((a, b) => h[a] - h[b]);
  fig.line(order.map((i) => [h[i], va[i]]), "#333", 1.2, "6,3");
  fig.line(order.map((i) => [h[i], vs[i]]), "#2ca02c", 1.2);
  fig.dots(order.map((i) => [h[i], v[i]]), "#d62728", 3.2);
  fig.errorBars(order.map((i) => [h[i], v[i], 3 * ve[i]]), "#d62728");
  fig.line([[fig.plotX.d0, 0], [fig.plotX.d1, 0]], "#999", 0.8, "2,3");
  fig.legend([
    ["measured front", "#d62728", "dot"],
    ["first order in h", "#333", "dash"],
    ["shooting", "#2ca02c", "line"],
  ]);
  const r = column(table, "r")[0];
  fig.axes("field h", "wall velocity v", `wall velocity (r=${r}) ${modelSummary(meta)}`);
  return fig.render();
}

/** Zero-velocity locus in the (r, h) chart with the h=0 reference. */
export function renderLocus(table: Table, meta: Metadata): string {
  requireColumns(table, ["r", "h"]);
  const r = column(table, "r");
  const h = column(table, "h");
  const fig = new Figure(W, H, extent(r), extent(h.concat([0])));
  fig.line([[fig.plotX.d0, 0], [fig.plotX.d1, 0]], "#d62728", 1.5);
  fig.dots(r.map((ri, i) => [ri, h[i]]), "#1f77b4", 3.5);
  fig.legend([
    ["measured zeros", "#1f77b4", "dot"],
    ["h = 0 (near-critical)", "#d62728", "line"],
  ]);
  fig.axes("r", "h", `zero-velocity locus ${modelSummary(meta)}`);
  return fig.render();
}

/** Space-time density map from a site-dumped 1D run. */
export function renderSpacetime(table: Table, meta: Metadata): string {
  requireColumns(table, ["t", "site_0_re", "site_0_im"]);
  const t = column(table, "t");
  const reCols = matchColumns(table, /^site_\d+_re$/);
  const L = reCols.length;
  const density: number[][] = [];
  for (let i = 0; i < t.length; i++) {
    density.push(new Array(L).fill(NaN));
  }
  for (let j = 0; j < L; j++) {
    const re = column(table, `site_${j}_re`);
    const im = column(table, `site_${j}_im`);
    for (let i = 0; i < t.length; i++) {
      density[i][j] = re[i] * re[i] + im[i] * im[i];
    }
  }
  const flat = density.flat().filter(Number.isFinite);
  const lo = Math.min(...flat);
  const hi = Math.max(...flat);
  const sites = Array.from({ length: L }, (_, j) => j);
  const fig = new Figure(W, H, extent(t, 0.0), [-0.5, L - 0.5]);
  fig.heatmap(t, sites, density, lo, hi);
  fig.axes("t", "site", `density space-time map ${modelSummary(meta)}`);
  return fig.render();
}

/** Phase diagram heatmap with the h=0 overlay from the metadata. */
export function renderPhasediagram(table: Table, meta: Metadata): string {
  requireColumns(table, ["mean_density", "converged", "seed"]);
  const a1name = table.columns[0];
  const a2name = table.columns[1];
  const a1 = column(table, a1name);
  const a2 = column(table, a2name);
  const n = column(table, "mean_density");
  const xs = uniq(a1);
  const ys = uniq(a2);
  const grid: number[][] = xs.map(() => new Array(ys.length).fill(NaN));
  for (let k = 0; k < n.length; k++) {
    const i = xs.indexOf(a1[k]);
    const j = ys.indexOf(a2[k]);
    if (i >= 0 && j >= 0) grid[i][j] = n[k];
  }
  const flat = n.filter(Number.isFinite);
  const fig = new Figure(W, H, extent(xs, 0.02), extent(ys, 0.02));
  fig.heatmap(xs, ys, grid, Math.min(...flat), Math.max(...flat));
  if (a1name === "kappa" && a2name === "omega") {
    const geo = chartGeometry(meta);
    const pts: Array<[number, number]> = [];
    for (let i = 0; i <= 80; i++) {
      const k = fig.plotX.d0 + ((fig.plotX.d1 - fig.plotX.d0) * i) / 80;
      if (k <= geo.kappaC) pts.push([k, geo.omegaAtH0(k)]);
    }
    fig.line(pts, "white", 1.8);
  }
  fig.axes(a1name, a2name, `phase diagram ${modelSummary(meta)}`);
  return fig.render();
}

export function render(kind: FigureKind, table: Table, meta: Metadata): string {
  switch (kind) {
    case "scurve":
      return renderScurve(table, meta);
    case "histogram":
      return renderHistogram(table, meta);
    case "trajectory":
      return renderTrajectory(table, meta);
    case "velocity":
      return renderVelocity(table, meta);
    case "locus":
      return renderLocus(table, meta);
    case "spacetime":
      return renderSpacetime(table, meta);
    case "phasediagram":
      return renderPhasediagram(table, meta);
    default:
      throw new SchemaError(`unknown figure kind '${kind}'`);
  }
}
