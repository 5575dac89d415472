/**
 * Command-line entry: convert one or more MAT batch files into a
 * canonical dataset directory.
 *
 *   convert --sources a.mat b.mat --out dataset/ [--vmin 2.0] [--vmax 3.5] [--points 500]
 */

import { convertBatches, SourceFormatError } from "./convert.js";
import { describeSource } from "./exclusions.js";

function usage(message: string): never {
  process.stderr.write(`error: ${message}\n`);
  process.stderr.write(
    "usage: convert --sources <file.mat...> --out <dir> [--vmin 2.0] [--vmax 3.5] [--points 500]\n",
  );
  process.exit(2);
}

function numberOption(raw: string | undefined, fallback: number, name: string): number {
  if (raw === undefined) {
    return fallback;
  }
  const value = Number(raw);
  if (!Number.isFinite(value)) {
    usage(`--${name} must be a number, got '${raw}'`);
  }
  return value;
}

/** --sources takes every following value up to the next flag, so the
 * stock option parser (one value per flag occurrence) does not fit. */
function scanArgs(argv: string[]): { sources: string[]; single: Map<string, string> } {
  const sources: string[] = [];
  const single = new Map<string, string>();
  let i = 0;
  while (i < argv.length) {
    const arg = argv[i]!;
    if (arg === "--sources") {
      i++;
      while (i < argv.length && !argv[i]!.startsWith("--")) {
        sources.push(argv[i]!);
        i++;
      }
    } else if (["--out", "--vmin", "--vmax", "--points"].includes(arg)) {
      const value = argv[i + 1];
      if (value === undefined || value.startsWith("--")) {
        usage(`${arg} needs a value`);
      }
      if (single.has(arg)) {
        usage(`${arg} given more than once`);
      }
      single.set(arg, value);
      i += 2;
    } else {
      usage(`unknown argument '${arg}'`);
    }
  }
  return { sources, single };
}

export function main(argv: string[]): number {
  const { sources, single } = scanArgs(argv);
  const values = {
    sources,
    out: single.get("--out"),
    vmin: single.get("--vmin"),
    vmax: single.get("--vmax"),
    points: single.get("--points"),
  };
  if (values.sources.length === 0) {
    usage("at least one --sources file is required");
  }
  if (!values.out) {
    usage("--out is required");
  }
  const grid = {
    vMin: numberOption(values.vmin, 2.0, "vmin"),
    vMax: numberOption(values.vmax, 3.5, "vmax"),
    points: numberOption(values.points, 500, "points"),
  };
  if (!Number.isInteger(grid.points) || grid.points < 2) {
    usage(`--points must be an integer >= 2, got ${grid.points}`);
  }

  let result;
  try {
    result = convertBatches(values.sources.map(describeSource), values.out, grid);
  } catch (err) {
    if (err instanceof SourceFormatError) {
      process.stderr.write(`error: ${err.message}\n`);
      return 1;
    }
    const code = (err as NodeJS.ErrnoException).code;
    if (typeof code === "string" && code.startsWith("E")) {
      process.stderr.write(`error: ${(err as Error).message}\n`);
      return 2;
    }
    throw err;
  }

  for (const report of result.log.sources) {
    const expected =
      report.expectedCells !== undefined && report.expectedCells !== report.cellsInFile
        ? ` (expected ${report.expectedCells} — check the source file)`
        : "";
    console.log(`${report.file}: ${report.cellsInFile} cells as batch '${report.label}'${expected}`);
  }
  console.log(`converted ${result.log.converted} cells to ${values.out}`);
  if (result.log.excluded.length > 0) {
    console.log(`excluded ${result.log.excluded.length}:`);
    for (const { id, reason } of result.log.excluded) {
      console.log(`  ${id}: ${reason}`);
    }
  }
  return 0;
}

if (process.argv[1] && process.argv[1].endsWith("cli-convert.js")) {
  process.exit(main(process.argv.slice(2)));
}
