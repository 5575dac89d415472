/**
 * Minimal MAT v5 reader covering the subset battery batch files use:
 * double/integer matrices, char arrays, struct arrays, cell arrays,
 * and zlib-compressed elements. Little-endian files only (the "IM"
 * byte order mark), which is what MATLAB and scipy write on every
 * current platform.
 *
 * Struct arrays are stored element-major: all fields of element 1,
 * then all fields of element 2, ... with elements flattened in
 * column-major order. Numeric data may be stored with a narrower
 * type than the array class; everything numeric is widened to
 * Float64Array here.
 */

import * as zlib from "node:zlib";

export type MatNumeric = { kind: "numeric"; dims: number[]; values: Float64Array };
export type MatChar = { kind: "char"; dims: number[]; text: string };
export type MatStruct = {
  kind: "struct";
  dims: number[];
  fields: string[];
  elements: Record<string, MatValue>[];
};
export type MatCell = { kind: "cell"; dims: number[]; elements: MatValue[] };
export type MatValue = MatNumeric | MatChar | MatStruct | MatCell;

// data element types
const miINT8 = 1;
const miUINT8 = 2;
const miINT16 = 3;
const miUINT16 = 4;
const miINT32 = 5;
const miUINT32 = 6;
const miSINGLE = 7;
const miDOUBLE = 9;
const miINT64 = 12;
const miUINT64 = 13;
const miMATRIX = 14;
const miCOMPRESSED = 15;
const miUTF8 = 16;
const miUTF16 = 17;

// array classes
const mxCELL_CLASS = 1;
const mxSTRUCT_CLASS = 2;
const mxCHAR_CLASS = 4;
const mxDOUBLE_CLASS = 6;
const mxSINGLE_CLASS = 7;
const FIRST_INT_CLASS = 8; // mxINT8..mxUINT32 = 8..13
const LAST_INT_CLASS = 13;

const NUMERIC_WIDTH: Record<number, number> = {
  [miINT8]: 1,
  [miUINT8]: 1,
  [miINT16]: 2,
  [miUINT16]: 2,
  [miINT32]: 4,
  [miUINT32]: 4,
  [miSINGLE]: 4,
  [miDOUBLE]: 8,
  [miINT64]: 8,
  [miUINT64]: 8,
};

export class MatFormatError extends Error {}

type Element = { type: number; data: Buffer };

/** Iterates the data elements of one buffer (tag + payload, 8-aligned). */
function* elements(buf: Buffer): Generator<Element> {
  let pos = 0;
  while (pos + 8 <= buf.length) {
    const word = buf.readUInt32LE(pos);
    const smallSize = word >>> 16;
    if (smallSize !== 0) {
      // small data element: type and size share the first word
      yield { type: word & 0xffff, data: buf.subarray(pos + 4, pos + 4 + smallSize) };
      pos += 8;
      continue;
    }
    const size = buf.readUInt32LE(pos + 4);
    if (pos + 8 + size > buf.length) {
      throw new MatFormatError(`element at ${pos} overruns the buffer`);
    }
    yield { type: word, data: buf.subarray(pos + 8, pos + 8 + size) };
    pos += 8 + size + ((8 - (size % 8)) % 8);
  }
}

function toFloat64(type: number, data: Buffer): Float64Array {
  const width = NUMERIC_WIDTH[type];
  if (width === undefined) {
    throw new MatFormatError(`unsupported numeric storage type ${type}`);
  }
  const n = Math.floor(data.length / width);
  const out = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    const at = i * width;
    switch (type) {
      case miINT8: out[i] = data.readInt8(at); break;
      case miUINT8: out[i] = data.readUInt8(at); break;
      case miINT16: out[i] = data.readInt16LE(at); break;
      case miUINT16: out[i] = data.readUInt16LE(at); break;
      case miINT32: out[i] = data.readInt32LE(at); break;
      case miUINT32: out[i] = data.readUInt32LE(at); break;
      case miSINGLE: out[i] = data.readFloatLE(at); break;
      case miDOUBLE: out[i] = data.readDoubleLE(at); break;
      case miINT64: out[i] = Number(data.readBigInt64LE(at)); break;
      case miUINT64: out[i] = Number(data.readBigUInt64LE(at)); break;
    }
  }
  return out;
}

function decodeChar(type: number, data: Buffer): string {
  switch (type) {
    case miUTF8:
    case miINT8:
    case miUINT8:
      return data.toString("utf8");
    case miUTF16:
    case miUINT16:
      return data.toString("utf16le");
    default:
      throw new MatFormatError(`unsupported char storage type ${type}`);
  }
}

function expect(el: Element | undefined, what: string): Element {
  if (el === undefined) {
    throw new MatFormatError(`truncated matrix: missing ${what}`);
  }
  return el;
}

/** Parses one miMATRIX payload into (name, value). */
function parseMatrix(buf: Buffer): { name: string; value: MatValue } {
  const it = elements(buf);
  const flagsEl = expect(it.next().value, "array flags");
  const flags = flagsEl.data.readUInt32LE(0);
  const klass = flags & 0xff;
  if ((flags >> 8) & 0x08) {
    throw new MatFormatError("complex arrays are not supported");
  }
  const dimsEl = expect(it.next().value, "dimensions");
  const dims: number[] = [];
  for (let i = 0; i + 4 <= dimsEl.data.length; i += 4) {
    dims.push(dimsEl.data.readInt32LE(i));
  }
  const count = dims.reduce((a, b) => a * b, 1);
  const name = expect(it.next().value, "name").data.toString("latin1");

  if (klass === mxCHAR_CLASS) {
    const data = expect(it.next().value, "char data");
    return { name, value: { kind: "char", dims, text: decodeChar(data.type, data.data) } };
  }

  if (
    klass === mxDOUBLE_CLASS ||
    klass === mxSINGLE_CLASS ||
    (klass >= FIRST_INT_CLASS && klass <= LAST_INT_CLASS)
  ) {
    // an empty matrix may omit the data element entirely
    const data = count === 0 ? undefined : expect(it.next().value, "numeric data");
    const values = data === undefined ? new Float64Array(0) : toFloat64(data.type, data.data);
    if (values.length !== count) {
      throw new MatFormatError(
        `numeric array "${name}": ${values.length} values for dims ${dims.join("x")}`,
      );
    }
    return { name, value: { kind: "numeric", dims, values } };
  }

  if (klass === mxCELL_CLASS) {
    const cells: MatValue[] = [];
    for (let i = 0; i < count; i++) {
      const el = expect(it.next().value, `cell ${i}`);
      if (el.type !== miMATRIX) {
        throw new MatFormatError(`cell ${i} holds element type ${el.type}`);
      }
      cells.push(parseMatrix(el.data).value);
    }
    return { name, value: { kind: "cell", dims, elements: cells } };
  }

  if (klass === mxSTRUCT_CLASS) {
    const lenEl = expect(it.next().value, "field name length");
    const nameLen = lenEl.data.readInt32LE(0);
    const namesEl = expect(it.next().value, "field names");
    const fields: string[] = [];
    for (let at = 0; at + nameLen <= namesEl.data.length; at += nameLen) {
      const raw = namesEl.data.subarray(at, at + nameLen);
      const end = raw.indexOf(0);
      fields.push(raw.toString("latin1", 0, end < 0 ? nameLen : end));
    }
    const structs: Record<string, MatValue>[] = [];
    for (let e = 0; e < count; e++) {
      const record: Record<string, MatValue> = {};
      for (const field of fields) {
        const el = expect(it.next().value, `field ${field} of element ${e}`);
        if (el.type !== miMATRIX) {
          throw new MatFormatError(`struct field ${field} holds element type ${el.type}`);
        }
        record[field] = parseMatrix(el.data).value;
      }
      structs.push(record);
    }
    return { name, value: { kind: "struct", dims, fields, elements: structs } };
  }

  throw new MatFormatError(`unsupported array class ${klass}`);
}

/** Parses a whole MAT v5 file into its top-level variables. */
export function parseMat(buf: Buffer): Map<string, MatValue> {
  if (buf.length < 128) {
    throw new MatFormatError("file shorter than the 128-byte MAT header");
  }
  const version = buf.readUInt16LE(124);
  const endian = buf.toString("latin1", 126, 128);
  if (endian === "MI") {
    throw new MatFormatError("big-endian MAT files are not supported");
  }
  if (endian !== "IM" || version !== 0x0100) {
    throw new MatFormatError(
      "not a MAT v5 file (v7.3/HDF5 files must be re-saved; see README)",
    );
  }

  const vars = new Map<string, MatValue>();
  for (let el of elements(buf.subarray(128))) {
    if (el.type === miCOMPRESSED) {
      const inflated = zlib.inflateSync(el.data);
      const inner = elements(inflated).next().value;
      el = expect(inner, "compressed payload");
    }
    if (el.type !== miMATRIX) {
      throw new MatFormatError(`unexpected top-level element type ${el.type}`);
    }
    const { name, value } = parseMatrix(el.data);
    vars.set(name, value);
  }
  return vars;
}

/** Numeric matrix → plain array, requiring it to be a vector or empty. */
export function asVector(value: MatValue, what: string): number[] {
  if (value.kind !== "numeric") {
    throw new MatFormatError(`${what}: expected a numeric array, got ${value.kind}`);
  }
  if (value.values.length > 0 && Math.min(...value.dims) > 1) {
    throw new MatFormatError(`${what}: expected a vector, got ${value.dims.join("x")}`);
  }
  return Array.from(value.values);
}

/** Numeric 1x1 matrix → its scalar. */
export function asScalar(value: MatValue, what: string): number {
  const vec = asVector(value, what);
  if (vec.length !== 1) {
    throw new MatFormatError(`${what}: expected a scalar, got length ${vec.length}`);
  }
  return vec[0]!;
}

/** Char array → trimmed string. */
export function asText(value: MatValue, what: string): string {
  if (value.kind !== "char") {
    throw new MatFormatError(`${what}: expected a char array, got ${value.kind}`);
  }
  return value.text.trim();
}
