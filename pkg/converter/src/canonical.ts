/**
 * Writer for the canonical dataset layout consumed downstream:
 *
 *   manifest.json
 *   cells/<id>/summary.csv     cycle,qd_ah,qc_ah,tavg_c,ir_ohm,charge_time_min
 *   cells/<id>/qdv_<cycle>.csv one capacity per grid point, grid order
 *
 * All numbers are plain decimal text; output bytes are a pure function
 * of the input data, so re-running a conversion reproduces every file
 * (and checksum) exactly.
 */

import * as crypto from "node:crypto";
import * as fs from "node:fs";
import * as path from "node:path";

export const SCHEMA_VERSION = "1";
export const SUMMARY_HEADER = "cycle,qd_ah,qc_ah,tavg_c,ir_ohm,charge_time_min";

export type SummaryRow = {
  cycle: number;
  qd: number;
  qc: number;
  tavg: number;
  ir: number;
  chargeTime: number;
};

export type CanonicalCell = {
  id: string;
  cycleLife: number;
  nominalCapacity: number;
  summaries: SummaryRow[];
  /** capacity per grid point, keyed by source cycle (10 and 100) */
  curves: Map<number, number[]>;
};

export type GridSpec = { vMin: number; vMax: number; points: number };

/** Shortest round-trip decimal form; integers stay bare. */
export function formatNumber(x: number): string {
  if (!Number.isFinite(x)) {
    throw new RangeError(`refusing to write non-finite value ${x}`);
  }
  return String(x);
}

export function sha256(data: Buffer | string): string {
  return crypto.createHash("sha256").update(data).digest("hex");
}

export function summaryCsv(rows: SummaryRow[]): string {
  const lines = [SUMMARY_HEADER];
  for (const r of rows) {
    lines.push(
      [r.cycle, r.qd, r.qc, r.tavg, r.ir, r.chargeTime]
        .map(formatNumber)
        .join(","),
    );
  }
  return lines.join("\n") + "\n";
}

export function curveCsv(values: number[]): string {
  return values.map(formatNumber).join("\n") + "\n";
}

export function manifestJson(
  cells: CanonicalCell[],
  grid: GridSpec,
  nominal: number,
  provenance: string,
): string {
  const manifest = {
    schema_version: SCHEMA_VERSION,
    grid: { v_min: grid.vMin, v_max: grid.vMax, points: grid.points },
    nominal_capacity: nominal,
    provenance,
    cells: cells.map((c) => ({
      id: c.id,
      cycle_life: c.cycleLife,
      nominal_capacity: c.nominalCapacity,
    })),
  };
  return JSON.stringify(manifest, null, 2) + "\n";
}

/**
 * Writes the full layout under outDir and returns sha256 checksums of
 * every file, keyed by path relative to outDir (POSIX separators).
 */
export function writeDataset(
  outDir: string,
  cells: CanonicalCell[],
  grid: GridSpec,
  nominal: number,
  provenance: string,
): Record<string, string> {
  const checksums: Record<string, string> = {};
  const put = (rel: string, text: string) => {
    const target = path.join(outDir, rel);
    fs.mkdirSync(path.dirname(target), { recursive: true });
    fs.writeFileSync(target, text);
    checksums[rel] = sha256(text);
  };

  put("manifest.json", manifestJson(cells, grid, nominal, provenance));
  for (const cell of cells) {
    put(`cells/${cell.id}/summary.csv`, summaryCsv(cell.summaries));
    for (const [cycle, values] of [...cell.curves.entries()].sort((a, b) => a[0] - b[0])) {
      put(`cells/${cell.id}/qdv_${cycle}.csv`, curveCsv(values));
    }
  }
  return checksums;
}
