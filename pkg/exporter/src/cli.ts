#!/usr/bin/env node
// embed-exporter --job job.json [--backend mock|http] [--server URL]
// Runs every export the job requests and writes a <artifact>.manifest.json
// next to each output recording model, backend and counts.

import { writeFileSync } from 'node:fs';
import { parseArgs } from 'node:util';

import { EmbedBackend, HttpBackend, MockBackend, modelDim } from './backends.js';
import { runJob, ExportResult } from './exporter.js';
import { JobError, loadJob } from './job.js';

function usage(): never {
  console.error(
    'usage: embed-exporter --job <job.json> [--backend mock|http] [--server URL]',
  );
  process.exit(2);
}

export async function main(argv: string[]): Promise<number> {
  let values;
  try {
    values = parseArgs({
      args: argv,
      options: {
        job: { type: 'string' },
        backend: { type: 'string', default: 'mock' },
        server: { type: 'string' },
      },
    }).values;
  } catch {
    usage();
  }
  if (!values.job) usage();

  const started = process.hrtime.bigint();
  try {
    const job = loadJob(values.job);
    const dim = modelDim(job.model, job.dim);
    let backend: EmbedBackend;
    if (values.backend === 'mock') {
      backend = new MockBackend(job.model, dim);
    } else if (values.backend === 'http') {
      if (!values.server) {
        throw new JobError('--backend http needs --server URL');
      }
      backend = new HttpBackend(values.server, job.model, dim);
    } else {
      throw new JobError(`unknown backend ${values.backend}`);
    }

    const results = await runJob(job, backend);
    const wall = Number(process.hrtime.bigint() - started) / 1e9;
    for (const res of results) {
      writeFileSync(res.path + '.manifest.json', JSON.stringify({
        op: res.op,
        model: job.model,
        backend: values.backend,
        dim,
        count: res.count,
        skipped: res.skipped,
        wall_time_s: wall,
      }, null, 2) + '\n');
    }
    console.log(JSON.stringify({ results }, null, 2));
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return err instanceof JobError ? 2 : 3;
  }
}

const entry = process.argv[1] ?? '';
if (entry.endsWith('cli.js') || entry.endsWith('embed-exporter')) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
