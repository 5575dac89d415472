/**
 * One-shot conversion from MAT-format batch files to the canonical
 * dataset layout.
 *
 * Expected source layout per file: a top-level 1xN struct array
 * `batch` whose elements carry
 *
 *   policy      char            charging policy (provenance only)
 *   barcode     char, optional  cell barcode (provenance only)
 *   cycle_life  1x1 double      as recorded upstream (informational;
 *                               life is re-derived from the summary)
 *   summary     struct          per-cycle channels: cycle, QDischarge,
 *                               QCharge, Tavg, IR, chargetime
 *   cycles      1xC struct      per-cycle measured records; elements
 *                               10 and 100 must hold V (descending)
 *                               and Qd (cumulative discharge) vectors
 *
 * A cell that cannot be converted faithfully is excluded with a logged
 * reason — records are never patched. Cell ids are `<label>c<index>`.
 */

import * as fs from "node:fs";

import { CanonicalCell, GridSpec, SummaryRow, sha256, writeDataset } from "./canonical.js";
import { SourceBatchDescriptor, describeSource } from "./exclusions.js";
import { descendingGrid, interpolateOntoGrid, InterpolationError } from "./interpolate.js";
import { asScalar, asVector, MatFormatError, MatStruct, MatValue, parseMat } from "./mat.js";

export const NOMINAL_CAPACITY_AH = 1.1;
export const LIFE_FRACTION = 0.8;
export const REQUIRED_CYCLES = [10, 100] as const;

export class SourceFormatError extends Error {}

export type CellOutcome =
  | { id: string; status: "converted"; cycleLife: number }
  | { id: string; status: "excluded"; reason: string };

export type BatchReport = {
  file: string;
  label: string;
  sha256: string;
  cellsInFile: number;
  expectedCells?: number;
};

export type ConversionLog = {
  tool: string;
  grid: { v_min: number; v_max: number; points: number };
  nominal_capacity: number;
  sources: BatchReport[];
  converted: number;
  excluded: { id: string; reason: string }[];
  checksums: Record<string, string>;
};

export type ConversionResult = {
  cells: CanonicalCell[];
  outcomes: CellOutcome[];
  log: ConversionLog;
};

class CellError extends Error {}

function field(record: Record<string, MatValue>, name: string): MatValue {
  const value = record[name];
  if (value === undefined) {
    throw new CellError(`missing field '${name}'`);
  }
  return value;
}

function asStruct(value: MatValue, what: string): MatStruct {
  if (value.kind !== "struct") {
    throw new CellError(`${what}: expected a struct, got ${value.kind}`);
  }
  return value;
}

const SUMMARY_FIELDS = ["cycle", "QDischarge", "QCharge", "Tavg", "IR", "chargetime"] as const;

function readSummaries(cell: Record<string, MatValue>): SummaryRow[] {
  const summary = asStruct(field(cell, "summary"), "summary");
  if (summary.elements.length !== 1) {
    throw new CellError(`summary: expected a 1x1 struct, got ${summary.dims.join("x")}`);
  }
  const record = summary.elements[0]!;
  const channels: Record<string, number[]> = {};
  for (const name of SUMMARY_FIELDS) {
    const value = record[name];
    if (value === undefined) {
      throw new CellError(`summary is missing channel '${name}'`);
    }
    channels[name] = asVector(value, `summary.${name}`);
  }
  const n = channels.cycle!.length;
  for (const name of SUMMARY_FIELDS) {
    if (channels[name]!.length !== n) {
      throw new CellError(
        `summary channel lengths differ: cycle has ${n}, ${name} has ${channels[name]!.length}`,
      );
    }
  }
  const rows: SummaryRow[] = [];
  for (let i = 0; i < n; i++) {
    const cyc = channels.cycle![i]!;
    if (cyc !== i + 1) {
      throw new CellError(`summary cycles are not contiguous from 1 (index ${i} holds ${cyc})`);
    }
    const row: SummaryRow = {
      cycle: cyc,
      qd: channels.QDischarge![i]!,
      qc: channels.QCharge![i]!,
      tavg: channels.Tavg![i]!,
      ir: channels.IR![i]!,
      chargeTime: channels.chargetime![i]!,
    };
    for (const [name, v] of Object.entries(row)) {
      if (!Number.isFinite(v)) {
        throw new CellError(`non-finite summary value '${name}' at cycle ${cyc}`);
      }
    }
    if (row.qd < 0 || row.qc < 0) {
      throw new CellError(`negative capacity at cycle ${cyc}`);
    }
    if (row.ir <= 0 || row.chargeTime <= 0) {
      throw new CellError(`non-positive IR or charge time at cycle ${cyc}`);
    }
    rows.push(row);
  }
  if (rows.length === 0) {
    throw new CellError("summary has no rows");
  }
  return rows;
}

/** First cycle whose discharge capacity falls strictly below the
 * threshold; the upstream recorded value is deliberately ignored. */
function deriveCycleLife(rows: SummaryRow[], nominal: number): number {
  const threshold = LIFE_FRACTION * nominal;
  for (const row of rows) {
    if (row.qd < threshold) {
      return row.cycle;
    }
  }
  throw new CellError(
    `discharge capacity never falls below ${LIFE_FRACTION * 100}% of nominal within the log`,
  );
}

function readCurve(
  cell: Record<string, MatValue>,
  cycle: number,
  gridV: number[],
): number[] {
  const cycles = asStruct(field(cell, "cycles"), "cycles");
  if (cycles.elements.length < cycle) {
    throw new CellError(`cycles struct has ${cycles.elements.length} elements, need ${cycle}`);
  }
  const entry = cycles.elements[cycle - 1]!;
  const v = asVector(field(entry, "V"), `cycles(${cycle}).V`);
  const qd = asVector(field(entry, "Qd"), `cycles(${cycle}).Qd`);
  if (v.length === 0 || qd.length === 0) {
    throw new CellError(`no discharge record for cycle ${cycle}`);
  }
  if (qd.some((x) => x < 0)) {
    throw new CellError(`negative discharge capacity in the cycle-${cycle} record`);
  }
  try {
    return interpolateOntoGrid(v, qd, gridV);
  } catch (err) {
    if (err instanceof InterpolationError) {
      throw new CellError(`cycle-${cycle} record: ${err.message}`);
    }
    throw err;
  }
}

function convertCell(
  id: string,
  record: Record<string, MatValue>,
  gridV: number[],
): CanonicalCell {
  const summaries = readSummaries(record);
  const last = summaries[summaries.length - 1]!;
  if (last.cycle < 100) {
    throw new CellError(`summary log ends at cycle ${last.cycle}, before cycle 100`);
  }
  const cycleLife = deriveCycleLife(summaries, NOMINAL_CAPACITY_AH);
  if (cycleLife <= 100) {
    throw new CellError(`cycle life ${cycleLife} is inside the 100-cycle observation window`);
  }
  const curves = new Map<number, number[]>();
  for (const cycle of REQUIRED_CYCLES) {
    curves.set(cycle, readCurve(record, cycle, gridV));
  }
  return {
    id,
    cycleLife,
    nominalCapacity: NOMINAL_CAPACITY_AH,
    summaries,
    curves,
  };
}

function loadBatch(source: SourceBatchDescriptor): {
  report: BatchReport;
  records: Record<string, MatValue>[];
} {
  const raw = fs.readFileSync(source.path);
  let vars: Map<string, MatValue>;
  try {
    vars = parseMat(raw);
  } catch (err) {
    if (err instanceof MatFormatError) {
      throw new SourceFormatError(`${source.path}: ${err.message}`);
    }
    throw err;
  }
  const batch = vars.get("batch");
  if (batch === undefined) {
    throw new SourceFormatError(`${source.path}: no top-level 'batch' variable`);
  }
  if (batch.kind !== "struct") {
    throw new SourceFormatError(`${source.path}: 'batch' is a ${batch.kind}, expected a struct`);
  }
  return {
    report: {
      file: source.path.split("/").pop()!,
      label: source.label,
      sha256: sha256(raw),
      cellsInFile: batch.elements.length,
      expectedCells: source.expectedCells,
    },
    records: batch.elements,
  };
}

export function convertBatches(
  sources: SourceBatchDescriptor[],
  outDir: string,
  grid: GridSpec,
): ConversionResult {
  const gridV = descendingGrid(grid.vMin, grid.vMax, grid.points);
  const cells: CanonicalCell[] = [];
  const outcomes: CellOutcome[] = [];
  const excluded: { id: string; reason: string }[] = [];
  const reports: BatchReport[] = [];

  for (const source of sources) {
    const { report, records } = loadBatch(source);
    reports.push(report);
    const knownBad = new Map(source.exclusions.map((e) => [e.id, e.reason]));
    for (let i = 0; i < records.length; i++) {
      const id = `${source.label}c${i}`;
      const listed = knownBad.get(id);
      if (listed !== undefined) {
        excluded.push({ id, reason: listed });
        outcomes.push({ id, status: "excluded", reason: listed });
        continue;
      }
      try {
        const cell = convertCell(id, records[i]!, gridV);
        cells.push(cell);
        outcomes.push({ id, status: "converted", cycleLife: cell.cycleLife });
      } catch (err) {
        if (err instanceof CellError || err instanceof MatFormatError) {
          excluded.push({ id, reason: err.message });
          outcomes.push({ id, status: "excluded", reason: err.message });
        } else {
          throw err;
        }
      }
    }
  }

  const provenance =
    "converted from MAT batches: " + reports.map((r) => `${r.label} (${r.file})`).join(", ");
  const checksums = writeDataset(outDir, cells, grid, NOMINAL_CAPACITY_AH, provenance);
  const log: ConversionLog = {
    tool: "cyclelife-converter",
    grid: { v_min: grid.vMin, v_max: grid.vMax, points: grid.points },
    nominal_capacity: NOMINAL_CAPACITY_AH,
    sources: reports,
    converted: cells.length,
    excluded,
    checksums,
  };
  fs.writeFileSync(`${outDir}/conversion_log.json`, JSON.stringify(log, null, 2) + "\n");
  return { cells, outcomes, log };
}

export { describeSource };
