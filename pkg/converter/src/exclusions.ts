/**
 * Known-bad cells in the public source batches, excluded up front with
 * the reasons documented by the data's own release notes and companion
 * processing code. Everything else is excluded only when this
 * converter finds a concrete defect in its records (logged per cell).
 *
 * Batch labels: the three public batch files are labeled b1..b3 by
 * recording date. Cell ids are `<label>c<index>` with the source
 * file's 0-based struct index.
 */

export type SourceBatchDescriptor = {
  path: string;
  label: string;
  expectedCells?: number;
  exclusions: { id: string; reason: string }[];
};

/** Recognized public batch files, keyed by file name. */
export const KNOWN_BATCHES: Record<
  string,
  { label: string; expectedCells: number }
> = {
  "2017-05-12_batchdata_updated_struct_errorcorrect.mat": { label: "b1", expectedCells: 46 },
  "2017-06-30_batchdata_updated_struct_errorcorrect.mat": { label: "b2", expectedCells: 48 },
  "2018-04-12_batchdata_updated_struct_errorcorrect.mat": { label: "b3", expectedCells: 46 },
};

export const KNOWN_BAD_CELLS: { id: string; reason: string }[] = [
  // batch 1: logging ended before these cells faded to 80% of nominal
  { id: "b1c8", reason: "log ends before reaching 80% of nominal capacity" },
  { id: "b1c10", reason: "log ends before reaching 80% of nominal capacity" },
  { id: "b1c12", reason: "log ends before reaching 80% of nominal capacity" },
  { id: "b1c13", reason: "log ends before reaching 80% of nominal capacity" },
  { id: "b1c22", reason: "log ends before reaching 80% of nominal capacity" },
  // batch 2: these channels continue batch-1 cells; their early-cycle
  // records live in batch 1, so the batch-2 entries are partial
  { id: "b2c7", reason: "continuation of a batch-1 cell; record is partial" },
  { id: "b2c8", reason: "continuation of a batch-1 cell; record is partial" },
  { id: "b2c9", reason: "continuation of a batch-1 cell; record is partial" },
  { id: "b2c15", reason: "continuation of a batch-1 cell; record is partial" },
  { id: "b2c16", reason: "continuation of a batch-1 cell; record is partial" },
  // batch 3: channels flagged noisy/faulty in the release notes
  { id: "b3c2", reason: "channel flagged as noisy in the release notes" },
  { id: "b3c23", reason: "channel flagged as noisy in the release notes" },
  { id: "b3c32", reason: "channel flagged as noisy in the release notes" },
  { id: "b3c37", reason: "channel flagged as faulty in the release notes" },
  { id: "b3c42", reason: "channel flagged as noisy in the release notes" },
  { id: "b3c43", reason: "channel flagged as noisy in the release notes" },
];

function sanitizeLabel(stem: string): string {
  const cleaned = stem.replace(/^batchdata[_-]?|^batch[_-]?/i, "").replace(/[^A-Za-z0-9_-]/g, "_");
  return cleaned.length > 0 ? cleaned : "batch";
}

/** Builds a descriptor for one source file, recognizing the public batches. */
export function describeSource(filePath: string): SourceBatchDescriptor {
  const base = filePath.split("/").pop()!;
  const known = KNOWN_BATCHES[base];
  const label = known ? known.label : sanitizeLabel(base.replace(/\.mat$/i, ""));
  const prefix = `${label}c`;
  return {
    path: filePath,
    label,
    expectedCells: known?.expectedCells,
    exclusions: KNOWN_BAD_CELLS.filter((e) => e.id.startsWith(prefix)),
  };
}
