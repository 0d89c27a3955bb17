// Embedding store writer/reader. Binary layout: "OCEB" magic, u32 LE
// version (1), u32 LE dim, u64 LE count, then count*dim float32 LE values
// row-major. A sidecar <stem>.meta.jsonl carries one manifest line
// {"_manifest":{"normalized":bool}} followed by one JSON object per row:
// {"id","class","split","extra"}.

import { readFileSync, writeFileSync } from 'node:fs';

export const FORMAT_VERSION = 1;
const MAGIC = 'OCEB';
const HEADER_BYTES = 20;

export interface StoreRecord {
  id: string;
  vector: Float32Array;
  class: string;
  split: string | null;
  extra?: Record<string, unknown>;
}

export interface LoadedStore {
  dim: number;
  normalized: boolean;
  records: StoreRecord[];
}

export function sidecarPath(path: string): string {
  const slash = Math.max(path.lastIndexOf('/'), path.lastIndexOf('\\'));
  const dot = path.lastIndexOf('.');
  const stem = dot > slash ? path.slice(0, dot) : path;
  return stem + '.meta.jsonl';
}

export function writeStore(
  path: string,
  dim: number,
  records: StoreRecord[],
  normalized = true,
): void {
  const header = Buffer.alloc(HEADER_BYTES);
  header.write(MAGIC, 0, 'ascii');
  header.writeUInt32LE(FORMAT_VERSION, 4);
  header.writeUInt32LE(dim, 8);
  header.writeBigUInt64LE(BigInt(records.length), 12);

  const payload = Buffer.alloc(records.length * dim * 4);
  records.forEach((rec, row) => {
    if (rec.vector.length !== dim) {
      throw new Error(
        `record ${rec.id}: vector has ${rec.vector.length} components, store dim is ${dim}`,
      );
    }
    for (let c = 0; c < dim; c++) {
      payload.writeFloatLE(rec.vector[c], (row * dim + c) * 4);
    }
  });
  writeFileSync(path, Buffer.concat([header, payload]));

  const lines = [JSON.stringify({ _manifest: { normalized } })];
  for (const rec of records) {
    lines.push(JSON.stringify({
      id: rec.id,
      class: rec.class,
      split: rec.split,
      extra: rec.extra ?? {},
    }));
  }
  writeFileSync(sidecarPath(path), lines.join('\n') + '\n');
}

export function readStore(path: string): LoadedStore {
  const raw = readFileSync(path);
  if (raw.length < HEADER_BYTES || raw.toString('ascii', 0, 4) !== MAGIC) {
    throw new Error(`${path}: not an OCEB file`);
  }
  const version = raw.readUInt32LE(4);
  if (version !== FORMAT_VERSION) {
    throw new Error(`${path}: unsupported format version ${version}`);
  }
  const dim = raw.readUInt32LE(8);
  const count = Number(raw.readBigUInt64LE(12));
  const expected = HEADER_BYTES + count * dim * 4;
  if (raw.length !== expected) {
    throw new Error(`${path}: payload is ${raw.length} bytes, expected ${expected}`);
  }

  const metaLines = readFileSync(sidecarPath(path), 'utf-8')
    .split('\n')
    .filter((line) => line.trim().length > 0)
    .map((line) => JSON.parse(line));
  if (metaLines.length === 0 || !('_manifest' in metaLines[0])) {
    throw new Error(`${path}: sidecar is missing its manifest line`);
  }
  const normalized = Boolean(metaLines[0]._manifest.normalized ?? true);
  const rows = metaLines.slice(1);
  if (rows.length !== count) {
    throw new Error(`${path}: sidecar has ${rows.length} records, payload has ${count}`);
  }

  const records: StoreRecord[] = rows.map((row, i) => {
    const vector = new Float32Array(dim);
    for (let c = 0; c < dim; c++) {
      vector[c] = raw.readFloatLE(HEADER_BYTES + (i * dim + c) * 4);
    }
    return {
      id: String(row.id),
      vector,
      class: String(row.class ?? ''),
      split: row.split ?? null,
      extra: row.extra ?? {},
    };
  });
  return { dim, normalized, records };
}
