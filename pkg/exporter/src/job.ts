// Export job description: which model, which images and prompts, where the
// artifacts go. Images carry the class/split tags that end up in the store
// sidecar; prompts are already fully expanded strings.

import { readFileSync } from 'node:fs';
import { z } from 'zod';

const ImageEntry = z.object({
  id: z.string().min(1),
  path: z.string().min(1),
  class: z.string().default(''),
  split: z.string().nullable().default(null),
  extra: z.record(z.string(), z.unknown()).default({}),
});

export const JobSchema = z.object({
  model: z.string().min(1),
  dim: z.number().int().positive().optional(),
  images: z.array(ImageEntry).default([]),
  prompts: z.array(z.string()).default([]),
  labels: z.array(z.string()).default([]),
  out: z.object({
    images: z.string().optional(),
    texts: z.string().optional(),
    boxes: z.string().optional(),
  }),
});

export type ExportJob = z.infer<typeof JobSchema>;
export type ImageRef = z.infer<typeof ImageEntry>;

export class JobError extends Error {}

export function parseJob(obj: unknown): ExportJob {
  const parsed = JobSchema.safeParse(obj);
  if (!parsed.success) {
    throw new JobError(`bad job: ${parsed.error.issues
      .map((i) => `${i.path.join('.')}: ${i.message}`)
      .join('; ')}`);
  }
  const ids = new Set<string>();
  for (const img of parsed.data.images) {
    if (ids.has(img.id)) throw new JobError(`duplicate image id ${img.id}`);
    ids.add(img.id);
  }
  return parsed.data;
}

export function loadJob(path: string): ExportJob {
  let obj: unknown;
  try {
    obj = JSON.parse(readFileSync(path, 'utf-8'));
  } catch (err) {
    throw new JobError(`${path}: ${(err as Error).message}`);
  }
  return parseJob(obj);
}
