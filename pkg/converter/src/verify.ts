/**
 * Post-conversion verification: recompute every file checksum against
 * the conversion log and re-derive each cell's cycle life from its
 * written summary, comparing against the manifest. Any mismatch or
 * missing file is reported; the caller exits nonzero if any are found.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { SUMMARY_HEADER, sha256 } from "./canonical.js";
import { LIFE_FRACTION } from "./convert.js";

export type Problem = { kind: "structural" | "checksum" | "cycle-life"; detail: string };

type Manifest = {
  schema_version: string;
  grid: { v_min: number; v_max: number; points: number };
  nominal_capacity: number;
  cells: { id: string; cycle_life: number; nominal_capacity?: number }[];
};

function readJson(file: string): unknown {
  return JSON.parse(fs.readFileSync(file, "utf8"));
}

function parseSummaryCsv(text: string, where: string, problems: Problem[]): number[][] {
  const lines = text.split("\n");
  if (lines[lines.length - 1] === "") {
    lines.pop();
  }
  if (lines[0] !== SUMMARY_HEADER) {
    problems.push({ kind: "structural", detail: `${where}: unexpected header '${lines[0]}'` });
    return [];
  }
  const rows: number[][] = [];
  for (const line of lines.slice(1)) {
    const values = line.split(",").map(Number);
    if (values.length !== 6 || values.some((v) => !Number.isFinite(v))) {
      problems.push({ kind: "structural", detail: `${where}: malformed row '${line}'` });
      return [];
    }
    rows.push(values);
  }
  return rows;
}

/** First summary cycle whose discharge capacity is strictly below
 * 80% of the cell's nominal capacity, or null if it never crosses. */
function deriveLife(rows: number[][], nominal: number): number | null {
  const threshold = LIFE_FRACTION * nominal;
  for (const row of rows) {
    if (row[1]! < threshold) {
      return row[0]!;
    }
  }
  return null;
}

export function verifyDataset(dir: string): Problem[] {
  const problems: Problem[] = [];

  const manifestPath = path.join(dir, "manifest.json");
  const logPath = path.join(dir, "conversion_log.json");
  for (const p of [manifestPath, logPath]) {
    if (!fs.existsSync(p)) {
      problems.push({ kind: "structural", detail: `missing ${path.basename(p)}` });
    }
  }
  if (problems.length > 0) {
    return problems;
  }

  const manifest = readJson(manifestPath) as Manifest;
  const log = readJson(logPath) as { checksums?: Record<string, string> };
  if (log.checksums === undefined || typeof log.checksums !== "object") {
    problems.push({ kind: "structural", detail: "conversion log has no checksum map" });
    return problems;
  }

  for (const [rel, expected] of Object.entries(log.checksums)) {
    const file = path.join(dir, rel);
    if (!fs.existsSync(file)) {
      problems.push({ kind: "structural", detail: `missing file ${rel}` });
      continue;
    }
    const actual = sha256(fs.readFileSync(file));
    if (actual !== expected) {
      problems.push({
        kind: "checksum",
        detail: `${rel}: log records ${expected.slice(0, 12)}…, file hashes to ${actual.slice(0, 12)}…`,
      });
    }
  }

  const logged = new Set(Object.keys(log.checksums));
  for (const cell of manifest.cells) {
    const summaryRel = path.join("cells", cell.id, "summary.csv");
    if (!logged.has(summaryRel)) {
      problems.push({ kind: "structural", detail: `cell ${cell.id} has no logged summary.csv` });
      continue;
    }
    for (const cycle of [10, 100]) {
      const rel = path.join("cells", cell.id, `qdv_${cycle}.csv`);
      if (!logged.has(rel) || !fs.existsSync(path.join(dir, rel))) {
        problems.push({ kind: "structural", detail: `cell ${cell.id}: missing ${rel}` });
      }
    }
    const summaryPath = path.join(dir, summaryRel);
    if (!fs.existsSync(summaryPath)) {
      continue; // already reported as a missing file above
    }
    const rows = parseSummaryCsv(fs.readFileSync(summaryPath, "utf8"), summaryRel, problems);
    if (rows.length === 0) {
      continue;
    }
    const nominal = cell.nominal_capacity ?? manifest.nominal_capacity;
    const derived = deriveLife(rows, nominal);
    if (derived === null) {
      problems.push({
        kind: "cycle-life",
        detail: `cell ${cell.id}: summary never crosses ${LIFE_FRACTION * 100}% of nominal`,
      });
    } else if (derived !== cell.cycle_life) {
      problems.push({
        kind: "cycle-life",
        detail: `cell ${cell.id}: manifest says ${cell.cycle_life}, summary derives ${derived}`,
      });
    }
  }

  return problems;
}
