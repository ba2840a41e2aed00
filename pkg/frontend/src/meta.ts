/** Metadata sidecar reader: run provenance and model parameters for labels. */

import { readFileSync } from "node:fs";

export interface Metadata {
  schema: number;
  seed: number;
  build_hash?: string;
  config?: Record<string, any>;
  kind?: string;
  [key: string]: any;
}

export class MetadataError extends Error {}

export function readMeta(path: string): Metadata {
  let parsed: any;
  try {
    parsed = JSON.parse(readFileSync(path, "utf-8"));
  } catch (err) {
    throw new MetadataError(`cannot read metadata ${path}: ${err}`);
  }
  if (typeof parsed !== "object" || parsed === null || parsed.schema !== 1) {
    throw new MetadataError(`${path} is not a schema=1 ddbh metadata file`);
  }
  return parsed as Metadata;
}

/** Model-parameter echo, tolerant of either mu or delta form (and of the
 * single-cavity parameter block). */
export function modelSummary(meta: Metadata): string {
  const m = meta.config?.model ?? meta.config?.cavity;
  if (!m) return "";
  const parts: string[] = [];
  if (m.mu !== undefined) parts.push(`mu=${m.mu}`);
  if (m.delta !== undefined) parts.push(`delta=${m.delta}`);
  for (const k of ["J", "u", "U", "kappa", "omega", "Omega", "r", "h", "scaleN"]) {
    if (m[k] !== undefined) parts.push(`${k}=${m[k]}`);
  }
  return parts.join(", ");
}

/** Critical point and the h=0 line from (mu, u): presentation-geometry
 * overlay for phase diagrams (same closed forms the data was made with). */
export function chartGeometry(meta: Metadata) {
  const m = meta.config?.model;
  if (!m) throw new MetadataError("metadata lacks config.model for the overlay");
  const J = Number(m.J ?? 0);
  const dims = Number(m.dims ?? 1);
  const mu = m.mu !== undefined ? Number(m.mu) : Number(m.delta) + 2 * dims * J;
  const u = Number(m.u);
  if (!(mu > 0) || !(u > 0)) {
    throw new MetadataError("metadata model needs positive mu and u for the overlay");
  }
  const kappaC = mu * Math.sqrt(4 / 3);
  const omegaC = mu * Math.pow(2 / 3, 1.5) * Math.sqrt(mu / u);
  return {
    mu,
    u,
    kappaC,
    omegaC,
    // h = 0 locus in the (kappa, omega) plane
    omegaAtH0: (kappa: number) =>
      omegaC + (Math.sqrt(3) / 4) * Math.sqrt((2 * mu) / (3 * u)) * (kappa - kappaC),
  };
}
