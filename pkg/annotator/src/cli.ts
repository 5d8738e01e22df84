#!/usr/bin/env node
/**
 * annotate --in <csv> --out <conllu> [--model <name>] [--batch <n>]
 *
 * Exit codes: 0 success, 1 pipeline load failure, 2 usage error,
 * 3 input/output failure. Warnings (skipped rows) go to stderr.
 */

import { readFileSync, writeFileSync } from 'node:fs';
import process from 'node:process';

import { annotateCsv } from './annotate.js';
import { loadPipeline } from './pipeline.js';

const USAGE =
  'usage: annotate --in <csv> --out <conllu> [--model <name>] [--batch <n>]';

function parseArgs(argv: string[]): Map<string, string> {
  const args = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (!key.startsWith('--') || value === undefined) {
      throw new Error(USAGE);
    }
    args.set(key.slice(2), value);
  }
  return args;
}

export function main(argv: string[]): number {
  if (argv.includes('--help') || argv.includes('-h')) {
    console.log(USAGE);
    return 0;
  }
  let args: Map<string, string>;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error((err as Error).message);
    return 2;
  }
  const input = args.get('in');
  const output = args.get('out');
  if (!input || !output) {
    console.error(USAGE);
    return 2;
  }
  const modelName = args.get('model') ?? 'wink-eng-lite-web-model';
  const batchSize = Number(args.get('batch') ?? '32');
  if (!Number.isFinite(batchSize) || batchSize < 1) {
    console.error(`bad --batch value: ${args.get('batch')}`);
    return 2;
  }

  let pipeline;
  try {
    pipeline = loadPipeline(modelName);
  } catch (err) {
    console.error((err as Error).message);
    return 1;
  }

  let content: string;
  try {
    content = readFileSync(input, 'utf-8');
  } catch (err) {
    console.error(`cannot read ${input}: ${(err as Error).message}`);
    return 3;
  }

  try {
    const result = annotateCsv(pipeline, content, batchSize);
    for (const warning of result.warnings) {
      console.error(`warning: ${warning}`);
    }
    writeFileSync(output, result.conllu, 'utf-8');
    console.error(
      `annotated ${result.annotatedReqIds.length} requirements -> ${output}`
    );
    return 0;
  } catch (err) {
    console.error((err as Error).message);
    return 3;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split('/').pop() ?? '');

if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
