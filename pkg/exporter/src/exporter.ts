// The three export operations. Pure format bridge: no averaging, no
// temperature, no scoring — all of that lives downstream. Output record
// order always matches job order (first occurrence, for deduped prompts);
// per-image failures are logged and skipped, but exporting nothing is an
// error.

import { readFileSync, writeFileSync } from 'node:fs';

import { EmbedBackend } from './backends.js';
import { ExportJob, JobError } from './job.js';
import { StoreRecord, writeStore } from './oceb.js';

export interface ExportResult {
  op: string;
  path: string;
  count: number;
  skipped: number;
}

export async function exportTextEmbeddings(
  job: ExportJob,
  backend: EmbedBackend,
): Promise<ExportResult> {
  const outPath = job.out.texts;
  if (!outPath) throw new JobError('job has no out.texts path');
  // exactly one record per distinct string, keyed by the exact string
  const seen = new Set<string>();
  const unique: string[] = [];
  for (const prompt of job.prompts) {
    if (!seen.has(prompt)) {
      seen.add(prompt);
      unique.push(prompt);
    }
  }
  if (unique.length === 0) throw new JobError('job has no prompts to export');
  const records: StoreRecord[] = [];
  for (const text of unique) {
    records.push({
      id: text,
      vector: await backend.embedText(text),
      class: '',
      split: null,
      extra: {},
    });
  }
  writeStore(outPath, backend.dim, records, true);
  return { op: 'texts', path: outPath, count: records.length, skipped: 0 };
}

export async function exportImageEmbeddings(
  job: ExportJob,
  backend: EmbedBackend,
): Promise<ExportResult> {
  const outPath = job.out.images;
  if (!outPath) throw new JobError('job has no out.images path');
  const records: StoreRecord[] = [];
  let skipped = 0;
  for (const entry of job.images) {
    try {
      const bytes = readFileSync(entry.path);
      records.push({
        id: entry.id,
        vector: await backend.embedImage(bytes),
        class: entry.class,
        split: entry.split,
        extra: entry.extra,
      });
    } catch (err) {
      console.error(`skipping image ${entry.id}: ${(err as Error).message}`);
      skipped++;
    }
  }
  if (records.length === 0) {
    throw new Error(`every image failed to export (${skipped} skipped)`);
  }
  writeStore(outPath, backend.dim, records, true);
  return { op: 'images', path: outPath, count: records.length, skipped };
}

export async function exportBoxScores(
  job: ExportJob,
  backend: EmbedBackend,
): Promise<ExportResult> {
  const outPath = job.out.boxes;
  if (!outPath) throw new JobError('job has no out.boxes path');
  if (job.labels.length === 0) {
    throw new JobError('box export needs a labels list');
  }
  const lines: string[] = [];
  let skipped = 0;
  for (const entry of job.images) {
    try {
      const bytes = readFileSync(entry.path);
      const boxes = await backend.detectBoxes(bytes, job.labels);
      lines.push(JSON.stringify({
        image_id: entry.id,
        label_order: job.labels,
        boxes,
      }));
    } catch (err) {
      console.error(`skipping image ${entry.id}: ${(err as Error).message}`);
      skipped++;
    }
  }
  if (lines.length === 0) {
    throw new Error(`every image failed box export (${skipped} skipped)`);
  }
  writeFileSync(outPath, lines.join('\n') + '\n');
  return { op: 'boxes', path: outPath, count: lines.length, skipped };
}

export async function runJob(
  job: ExportJob,
  backend: EmbedBackend,
): Promise<ExportResult[]> {
  const results: ExportResult[] = [];
  if (job.out.texts) results.push(await exportTextEmbeddings(job, backend));
  if (job.out.images) results.push(await exportImageEmbeddings(job, backend));
  if (job.out.boxes) results.push(await exportBoxScores(job, backend));
  if (results.length === 0) {
    throw new JobError('job requests no outputs (set out.images, out.texts, or out.boxes)');
  }
  return results;
}
