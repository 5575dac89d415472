/**
 * Command-line entry: verify a converted dataset directory against its
 * conversion log — recompute checksums and re-derive each cell's cycle
 * life from the written summaries. Exits nonzero on any mismatch.
 *
 *   verify --dir dataset/
 */

import { parseArgs } from "node:util";

import { verifyDataset } from "./verify.js";

function usage(message: string): never {
  process.stderr.write(`error: ${message}\n`);
  process.stderr.write("usage: verify --dir <dataset-dir>\n");
  process.exit(2);
}

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      options: { dir: { type: "string" } },
      allowPositionals: false,
    });
  } catch (err) {
    usage((err as Error).message);
  }
  const dir = parsed.values.dir;
  if (!dir) {
    usage("--dir is required");
  }

  const problems = verifyDataset(dir);
  if (problems.length === 0) {
    console.log(`ok: ${dir} matches its conversion log`);
    return 0;
  }
  for (const problem of problems) {
    console.log(`${problem.kind}: ${problem.detail}`);
  }
  console.log(`${problems.length} problem(s) found`);
  return 1;
}

if (process.argv[1] && process.argv[1].endsWith("cli-verify.js")) {
  process.exit(main(process.argv.slice(2)));
}
