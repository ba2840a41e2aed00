/**
 * Minimal headless SVG figure builder: linear scales, ticks, axis labels,
 * polylines, markers, and cell heatmaps.  Output is deterministic (no
 * timestamps or random ids), so re-rendering identical inputs yields
 * identical bytes.
 */

export interface Margins {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

const FONT = "12px sans-serif";

export class Scale {
  constructor(
    public d0: number,
    public d1: number,
    public r0: number,
    public r1: number,
  ) {}

  at(x: number): number {
    if (this.d1 === this.d0) return 0.5 * (this.r0 + this.r1);
    return this.r0 + ((x - this.d0) / (this.d1 - this.d0)) * (this.r1 - this.r0);
  }
}

export function extent(values: number[], pad = 0.05): [number, number] {
  const finite = values.filter((v) => Number.isFinite(v));
  if (finite.length === 0) return [0, 1];
  let lo = Math.min(...finite);
  let hi = Math.max(...finite);
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const span = hi - lo;
  return [lo - pad * span, hi + pad * span];
}

export function ticks(lo: number, hi: number, n = 5): number[] {
  const span = hi - lo;
  if (!(span > 0)) return [lo];
  const step0 = Math.pow(10, Math.floor(Math.log10(span / n)));
  const err = (span / n) / step0;
  const step = step0 * (err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1);
  const start = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = start; v <= hi + 1e-12 * span; v += step) {
    out.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return out;
}

export function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1);
  return String(parseFloat(v.toPrecision(4)));
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/** Viridis-like perceptual colormap (piecewise-linear approximation). */
export function colormap(t: number): string {
  const stops: [number, number, number][] = [
    [68, 1, 84],
    [59, 82, 139],
    [33, 145, 140],
    [94, 201, 98],
    [253, 231, 37],
  ];
  const x = Math.min(1, Math.max(0, t)) * (stops.length - 1);
  const i = Math.min(stops.length - 2, Math.floor(x));
  const f = x - i;
  const c = stops[i].map((a, k) => Math.round(a + f * (stops[i + 1][k] - a)));
  return `rgb(${c[0]},${c[1]},${c[2]})`;
}

export class Figure {
  private parts: string[] = [];
  readonly plotX: Scale;
  readonly plotY: Scale;
  readonly margins: Margins;

  constructor(
    public width: number,
    public height: number,
    xDomain: [number, number],
    yDomain: [number, number],
    margins?: Partial<Margins>,
  ) {
    this.margins = { top: 28, right: 16, bottom: 42, left: 64, ...margins };
    this.plotX = new Scale(xDomain[0], xDomain[1], this.margins.left, width - this.margins.right);
    this.plotY = new Scale(yDomain[0], yDomain[1], height - this.margins.bottom, this.margins.top);
  }

  raw(s: string): void {
    this.parts.push(s);
  }

  line(pts: Array<[number, number]>, stroke: string, width = 1.5, dash = ""): void {
    const d = pts
      .filter(([x, y]) => Number.isFinite(x) && Number.isFinite(y))
      .map(([x, y]) => `${this.plotX.at(x).toFixed(2)},${this.plotY.at(y).toFixed(2)}`)
      .join(" ");
    const dasha = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<polyline fill="none" stroke="${stroke}" stroke-width="${width}"${dasha} points="${d}"/>`,
    );
  }

  dots(pts: Array<[number, number]>, fill: string, r = 3): void {
    for (const [x, y] of pts) {
      if (!Number.isFinite(x) || !Number.isFinite(y)) continue;
      this.parts.push(
        `<circle cx="${this.plotX.at(x).toFixed(2)}" cy="${this.plotY.at(y).toFixed(2)}" r="${r}" fill="${fill}"/>`,
      );
    }
  }

  errorBars(pts: Array<[number, number, number]>, stroke: string): void {
    for (const [x, y, e] of pts) {
      if (!Number.isFinite(x) || !Number.isFinite(y) || !Number.isFinite(e)) continue;
      const cx = this.plotX.at(x).toFixed(2);
      const y0 = this.plotY.at(y - e).toFixed(2);
      const y1 = this.plotY.at(y + e).toFixed(2);
      this.parts.push(
        `<line x1="${cx}" x2="${cx}" y1="${y0}" y2="${y1}" stroke="${stroke}" stroke-width="1"/>`,
      );
    }
  }

  /** Heatmap over cell centers xs x ys (uniform grids). */
  heatmap(xs: number[], ys: number[], values: number[][], lo: number, hi: number): void {
    const dx = xs.length > 1 ? xs[1] - xs[0] : 1;
    const dy = ys.length > 1 ? ys[1] - ys[0] : 1;
    const span = hi - lo || 1;
    for (let i = 0; i < xs.length; i++) {
      for (let j = 0; j < ys.length; j++) {
        const v = values[i][j];
        if (!Number.isFinite(v)) continue;
        const x0 = this.plotX.at(xs[i] - dx / 2);
        const x1 = this.plotX.at(xs[i] + dx / 2);
        const y0 = this.plotY.at(ys[j] - dy / 2);
        const y1 = this.plotY.at(ys[j] + dy / 2);
        const xa = Math.min(x0, x1);
        const ya = Math.min(y0, y1);
        const w = Math.abs(x1 - x0) + 0.5;
        const h = Math.abs(y1 - y0) + 0.5;
        this.parts.push(
          `<rect x="${xa.toFixed(2)}" y="${ya.toFixed(2)}" width="${w.toFixed(2)}" height="${h.toFixed(2)}" fill="${colormap((v - lo) / span)}"/>`,
        );
      }
    }
  }

  axes(xLabel: string, yLabel: string, title: string): void {
    const { left, right, top, bottom } = this.margins;
    const x0 = left;
    const x1 = this.width - right;
    const y0 = this.height - bottom;
    const y1 = top;
    const ax: string[] = [];
    ax.push(`<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" fill="none" stroke="#333" stroke-width="1"/>`);
    for (const t of ticks(this.plotX.d0, this.plotX.d1)) {
      const px = this.plotX.at(t).toFixed(2);
      ax.push(`<line x1="${px}" x2="${px}" y1="${y0}" y2="${y0 + 5}" stroke="#333"/>`);
      ax.push(`<text x="${px}" y="${y0 + 18}" text-anchor="middle" style="font:${FONT}">${fmt(t)}</text>`);
    }
    for (const t of ticks(this.plotY.d0, this.plotY.d1)) {
      const py = this.plotY.at(t).toFixed(2);
      ax.push(`<line x1="${x0 - 5}" x2="${x0}" y1="${py}" y2="${py}" stroke="#333"/>`);
      ax.push(`<text x="${x0 - 8}" y="${py}" text-anchor="end" dominant-baseline="middle" style="font:${FONT}">${fmt(t)}</text>`);
    }
    ax.push(`<text x="${(x0 + x1) / 2}" y="${this.height - 8}" text-anchor="middle" style="font:${FONT}">${esc(xLabel)}</text>`);
    ax.push(`<text transform="translate(14,${(y0 + y1) / 2}) rotate(-90)" text-anchor="middle" style="font:${FONT}">${esc(yLabel)}</text>`);
    ax.push(`<text x="${(x0 + x1) / 2}" y="16" text-anchor="middle" style="font:${FONT};font-weight:bold">${esc(title)}</text>`);
    this.parts.push(...ax);
  }

  legend(entries: Array<[string, string, string]>): void {
    // entries: [label, color, style]; style "line"|"dash"|"dot"
    let y = this.margins.top + 12;
    const x = this.width - this.margins.right - 150;
    for (const [label, color, style] of entries) {
      if (style === "dot") {
        this.parts.push(`<circle cx="${x + 12}" cy="${y - 4}" r="3" fill="${color}"/>`);
      } else {
        const dash = style === "dash" ? ` stroke-dasharray="5,3"` : "";
        this.parts.push(`<line x1="${x}" x2="${x + 24}" y1="${y - 4}" y2="${y - 4}" stroke="${color}" stroke-width="2"${dash}/>`);
      }
      this.parts.push(`<text x="${x + 30}" y="${y}" style="font:${FONT}">${esc(label)}</text>`);
      y += 16;
    }
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">` +
      `<rect width="100%" height="100%" fill="white"/>` +
      this.parts.join("") +
      `</svg>`
    );
  }
}
